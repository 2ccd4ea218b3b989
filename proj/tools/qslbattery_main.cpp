#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qslbattery/config.hpp"
#include "qslbattery/csv.hpp"
#include "qslbattery/errors.hpp"
#include "qslbattery/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qslbattery/threading.hpp"

namespace {

int run_sweep_command(const std::string& config_path, const std::string& out_override) {
    qbat::cli::RunConfig cfg = config_path.empty() ? qbat::cli::RunConfig{}
                                                   : qbat::cli::parse_config_file(config_path);
    if (cfg.columns.empty()) cfg.columns = qbat::cli::all_columns();
    if (!out_override.empty()) cfg.out_path = out_override;
    if (cfg.out_path.empty()) throw qbat::UsageError("no output path: pass --out or set out_path");

    const qbat::cli::SweepOutput sweep = qbat::cli::run_sweep(cfg);
    for (const std::string& note : sweep.notes) std::cerr << "note: " << note << "\n";

    const qbat::cli::CsvTable selected = qbat::cli::select_columns(sweep.table, cfg.columns);
    qbat::cli::write_csv(selected, cfg.out_path);
    qbat::cli::validate_csv_file(cfg.out_path);
    std::cerr << "wrote " << cfg.out_path << " (" << selected.rows() << " rows)\n";
    return 0;
}

int run_figure_command(int id, const std::string& out_dir) {
    const std::vector<std::string> files = qbat::cli::figure_preset(id, out_dir);
    for (const std::string& f : files) std::cerr << "wrote " << f << "\n";
    return 0;
}

int run_report_command(const std::string& config_path, const std::string& json_path) {
    const qbat::cli::RunConfig cfg = config_path.empty()
                                         ? qbat::cli::RunConfig{}
                                         : qbat::cli::parse_config_file(config_path);
    const qbat::cli::RegimeReport rep = qbat::cli::regime_report(cfg);
    std::cout << qbat::cli::report_text(rep);
    if (!json_path.empty()) {
        if (json_path == "-") {
            std::cout << qbat::cli::report_json(rep) << "\n";
        } else {
            std::ofstream out(json_path, std::ios::binary);
            if (!out) throw qbat::IoError("cannot open for writing: " + json_path);
            out << qbat::cli::report_json(rep) << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    omp_set_num_threads(qbat::worker_count());
#endif

    CLI::App app{"Damped-qubit battery: speed-limit bounds, ergotropy and powers"};
    app.require_subcommand(1);

    std::string sweep_config, sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "evaluate all columns over one time grid");
    sweep->add_option("--config", sweep_config, "JSON config file (defaults when omitted)");
    sweep->add_option("--out", sweep_out, "output CSV path (overrides out_path)");

    int figure_id = 0;
    std::string figure_dir = ".";
    CLI::App* figure = app.add_subcommand("figure", "emit a preset comparison data set");
    figure->add_option("--id", figure_id, "preset id, 1..5")->required();
    figure->add_option("--out-dir", figure_dir, "output directory");

    std::string report_config, report_json_path;
    CLI::App* report = app.add_subcommand("report", "regime classification and extrema tables");
    report->add_option("--config", report_config, "JSON config file (defaults when omitted)");
    report->add_option("--json", report_json_path, "also write the machine-readable summary "
                                                   "('-' for stdout)");

    try {
        app.parse(argc, argv);
        if (sweep->parsed()) return run_sweep_command(sweep_config, sweep_out);
        if (figure->parsed()) return run_figure_command(figure_id, figure_dir);
        if (report->parsed()) return run_report_command(report_config, report_json_path);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qbat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const qbat::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const qbat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
