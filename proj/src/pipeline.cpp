#include "qslbattery/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qslbattery/errors.hpp"

namespace qbat::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double range_of(const std::vector<double>& ys) {
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    return *hi - *lo;
}

} // namespace

SweepOutput run_sweep(const RunConfig& config) {
    config.validate();

    const TrajectoryGrid grid = build_trajectory(config.model, config.tmax, config.samples);
    const Hamiltonian2 h = Hamiltonian2::qubit(config.model.omega0);

    const std::vector<ThermoSample> thermo = thermo_series(grid, h, config.model.temperature);

    const double step = grid.dt();
    const auto k0 = static_cast<std::size_t>(std::llround(config.avg_power_t0 / step));
    if (k0 >= grid.size() ||
        std::abs(grid.times[k0] - config.avg_power_t0) > 1e-9 * std::max(1.0, config.tmax))
        throw ConfigError("avg_power_t0 must coincide with a grid point");

    std::vector<double> w(grid.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = thermo[k].w;
    const PowerSeries power = power_series(grid.times, w, config.avg_power_t0);

    QslOptions qopt;
    qopt.quad = config.quad;
    qopt.bures_variant = config.bures_variant;
    qopt.relpurity_mode = config.relpurity_mode;
    qopt.epsilon_floor = config.epsilon_floor;
    const QslSweep sweep(grid, qopt);
    const std::vector<QslResult> qsl = sweep.all();

    SweepOutput out;
    out.stationary = qsl.back().stationary;
    out.singular_integrand = sweep.singular_integrand_flagged();

    std::size_t gamma_nans = 0;
    std::vector<double> gamma(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        try {
            gamma[k] = rates(grid.times[k], config.model).gamma;
        } catch (const RateSingular&) {
            gamma[k] = kNan;
            ++gamma_nans;
        }
    }
    if (gamma_nans > 0)
        out.notes.push_back("gamma is nan at " + std::to_string(gamma_nans) +
                            " sample(s) where G(t) vanishes; the generator stays finite there");
    if (out.singular_integrand)
        out.notes.push_back("more than 0.1% of samples fell inside the singular guard of the "
                            "relative-purity integrand");
    if (out.stationary)
        out.notes.push_back("stationary trajectory (c_e = 0): all measures vanish identically");

    CsvTable& t = out.table;
    t.columns = all_columns();
    t.data.assign(t.columns.size(), std::vector<double>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::size_t c = 0;
        t.data[c++][k] = grid.times[k];
        t.data[c++][k] = grid.gsamples[k].g;
        t.data[c++][k] = gamma[k];
        t.data[c++][k] = thermo[k].purity;
        t.data[c++][k] = thermo[k].c_l1;
        t.data[c++][k] = thermo[k].c_relent;
        t.data[c++][k] = thermo[k].w;
        t.data[c++][k] = thermo[k].w_i;
        t.data[c++][k] = thermo[k].w_c;
        t.data[c++][k] = power.p_inst[k];
        t.data[c++][k] = power.p_avg[k];
        t.data[c++][k] = qsl[k].tau_qsl_fisher;
        t.data[c++][k] = qsl[k].tau_qsl_wy;
        t.data[c++][k] = qsl[k].tau_qsl_relpurity;
        t.data[c++][k] = qsl[k].tau_csl;
    }
    t.meta_json = config_to_json(config);
    return out;
}

CsvTable select_columns(const CsvTable& table, const std::vector<std::string>& columns) {
    CsvTable out;
    out.meta_json = table.meta_json;
    for (const std::string& name : columns) {
        const auto it = std::find(table.columns.begin(), table.columns.end(), name);
        if (it == table.columns.end()) throw IoError("select_columns: no column '" + name + "'");
        out.columns.push_back(name);
        out.data.push_back(table.data[static_cast<std::size_t>(it - table.columns.begin())]);
    }
    return out;
}

namespace {

RunConfig preset_config(int id) {
    RunConfig cfg;  // defaults: omega0 1, lambda 0.5, gamma0 10, T 1, tmax 3, samples 3000
    if (id == 4) {
        cfg.model.gamma0 = 0.1;
        cfg.tmax = 15.0;
        cfg.samples = 15000;
    }
    cfg.quad.n = cfg.samples;
    return cfg;
}

std::vector<std::string> preset_columns(int id) {
    switch (id) {
    case 1: return {"t", "tau_qsl_fisher", "tau_qsl_wy", "tau_qsl_relpurity"};
    case 2: return {"t", "tau_csl", "tau_csl_x10", "w", "w_c", "p_inst", "p_avg"};
    case 3: return {"t", "tau_qsl_relpurity", "w", "w_c", "p_inst", "p_avg"};
    case 4: return {"t", "tau_qsl_fisher", "w", "p_inst", "p_avg"};
    case 5: return {"t", "tau_qsl_fisher", "tau_qsl_wy", "w", "p_inst", "p_avg"};
    default: throw UsageError("figure id must lie in 1..5");
    }
}

std::string gnuplot_stub(int id, const std::vector<std::string>& cols) {
    std::ostringstream ss;
    ss << "# gnuplot stub for fig" << id << ".csv\n";
    ss << "set datafile separator ','\n";
    ss << "set key autotitle columnhead\n";
    ss << "set xlabel 't'\n";
    ss << "plot";
    for (std::size_t c = 1; c < cols.size(); ++c)
        ss << (c == 1 ? " " : ", \\\n     ") << "'fig" << id << ".csv' using 1:" << c + 1
           << " with lines";
    ss << "\n";
    return ss.str();
}

} // namespace

std::vector<std::string> figure_preset(int id, const std::string& out_dir) {
    const std::vector<std::string> cols = preset_columns(id);  // validates id first
    const RunConfig cfg = preset_config(id);
    SweepOutput sweep = run_sweep(cfg);

    if (id == 2) {
        // the coherence bound is conventionally plotted scaled by 10
        const auto it = std::find(sweep.table.columns.begin(), sweep.table.columns.end(),
                                  std::string("tau_csl"));
        std::vector<double> scaled = sweep.table.data[static_cast<std::size_t>(
            it - sweep.table.columns.begin())];
        for (double& v : scaled) v *= 10.0;
        sweep.table.columns.push_back("tau_csl_x10");
        sweep.table.data.push_back(std::move(scaled));
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    const CsvTable selected = select_columns(sweep.table, cols);
    const std::string csv_path = out_dir + "/fig" + std::to_string(id) + ".csv";
    write_csv(selected, csv_path);
    validate_csv_file(csv_path);

    const std::string gp_path = out_dir + "/fig" + std::to_string(id) + ".gp";
    std::ofstream gp(gp_path, std::ios::binary);
    if (!gp) throw IoError("cannot open for writing: " + gp_path);
    gp << gnuplot_stub(id, cols);

    return {csv_path, gp_path};
}

std::vector<AlignmentRow> align_extrema(const std::vector<Extremum>& probe,
                                        const std::vector<Extremum>& partner, bool same_kind,
                                        double step, double max_steps) {
    std::vector<AlignmentRow> rows;
    for (const Extremum& e : probe) {
        AlignmentRow row{e.t, e.is_max, kNan, false, kNan, false};
        double best = std::numeric_limits<double>::infinity();
        for (const Extremum& p : partner) {
            const double d = std::abs(p.t - e.t);
            if (d < best) {
                best = d;
                row.partner_t = p.t;
                row.partner_is_max = p.is_max;
            }
        }
        if (std::isfinite(best)) {
            row.distance_in_steps = best / step;
            const bool kind_ok =
                same_kind ? (row.partner_is_max == e.is_max) : (row.partner_is_max != e.is_max);
            row.matched = kind_ok && row.distance_in_steps <= max_steps;
        }
        rows.push_back(row);
    }
    return rows;
}

RegimeReport regime_report(const RunConfig& config) {
    config.validate();
    RegimeReport rep{};
    const Regime regime = coupling_regime(config.model);
    rep.regime = regime;
    rep.standard_ad = regime == Regime::StandardAD;
    rep.first_full_discharge = kNan;
    rep.standard_ad_max_rel_dev = kNan;

    const std::vector<double> zeros = find_g_zeros(config.model, config.tmax);
    for (std::size_t i = 0; i < zeros.size() && i < 3; ++i) rep.g_zeros.push_back(zeros[i]);
    if (!zeros.empty()) rep.first_full_discharge = zeros.front();

    // sign scan of the decay rate; interval ends refined to grid resolution
    const std::size_t n = config.samples;
    const double h = config.tmax / static_cast<double>(n);
    bool inside = false;
    double start = 0.0;
    double last_ok = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = static_cast<double>(k) * h;
        double g;
        try {
            g = rates(t, config.model).gamma;
        } catch (const RateSingular&) {
            continue;
        }
        if (g < 0.0 && !inside) {
            inside = true;
            start = t;
        } else if (g >= 0.0 && inside) {
            inside = false;
            rep.negative_gamma_intervals.emplace_back(start, last_ok);
        }
        last_ok = t;
    }
    if (inside) rep.negative_gamma_intervals.emplace_back(start, config.tmax);

    // a completed cycle = a full discharge followed by a revival peak of |G|
    int cycles = 0;
    for (const double z : zeros) {
        double prev = std::abs(g_function(z + h, config.model).g);
        for (double t = z + 2.0 * h; t <= config.tmax; t += h) {
            const double cur = std::abs(g_function(t, config.model).g);
            if (cur < prev) {
                ++cycles;
                break;
            }
            prev = cur;
        }
    }
    rep.cycle_count = cycles;

    if (rep.standard_ad) {
        double dev = 0.0;
        for (double t = 0.1; t <= 10.0 + 1e-12; t += 1e-3) {
            const double g = rates(t, config.model).gamma;
            dev = std::max(dev, std::abs(g - config.model.gamma0) / config.model.gamma0);
        }
        rep.standard_ad_max_rel_dev = dev;
    }

    // alignment tables behind the three comparison figures
    const SweepOutput sweep = run_sweep(config);
    const auto col = [&](const char* name) {
        const auto it =
            std::find(sweep.table.columns.begin(), sweep.table.columns.end(), std::string(name));
        return sweep.table.data[static_cast<std::size_t>(it - sweep.table.columns.begin())];
    };
    const std::vector<double>& ts = sweep.table.data[0];
    const auto extrema_of = [&](const std::vector<double>& ys) {
        return extrema_locator(ts, ys, 0.05 * range_of(ys));
    };
    const auto csl = extrema_of(col("tau_csl"));
    const auto wc = extrema_of(col("w_c"));
    const auto relp = extrema_of(col("tau_qsl_relpurity"));
    const auto pinst = extrema_of(col("p_inst"));
    const auto fisher = extrema_of(col("tau_qsl_fisher"));
    const auto wtot = extrema_of(col("w"));
    rep.csl_vs_wc = align_extrema(csl, wc, true, h, 1.0);
    rep.relpurity_vs_power = align_extrema(relp, pinst, false, h, 2.0);
    rep.fisher_vs_cycles = align_extrema(fisher, wtot, false, h, 2.0);
    return rep;
}

namespace {

nlohmann::json alignment_json(const std::vector<AlignmentRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AlignmentRow& r : rows) {
        nlohmann::json o;
        o["t"] = r.t;
        o["kind"] = r.is_max ? "max" : "min";
        o["partner_t"] = r.partner_t;
        o["partner_kind"] = r.partner_is_max ? "max" : "min";
        o["distance_steps"] = r.distance_in_steps;
        o["matched"] = r.matched;
        arr.push_back(o);
    }
    return arr;
}

void alignment_text(std::ostringstream& ss, const char* title,
                    const std::vector<AlignmentRow>& rows) {
    ss << title << "\n";
    if (rows.empty()) {
        ss << "  (no extrema above the prominence threshold)\n";
        return;
    }
    for (const AlignmentRow& r : rows) {
        ss << "  " << (r.is_max ? "max" : "min") << " at t=" << r.t << "  <->  "
           << (r.partner_is_max ? "max" : "min") << " at t=" << r.partner_t
           << "  (" << r.distance_in_steps << " steps, " << (r.matched ? "matched" : "unmatched")
           << ")\n";
    }
}

} // namespace

std::string report_text(const RegimeReport& rep) {
    std::ostringstream ss;
    ss << "regime: " << regime_name(rep.regime) << "\n";
    ss << "zeros of G: ";
    if (rep.g_zeros.empty()) ss << "none\n";
    else {
        for (std::size_t i = 0; i < rep.g_zeros.size(); ++i)
            ss << (i ? ", " : "") << rep.g_zeros[i];
        ss << "\n";
    }
    ss << "negative decay-rate intervals: ";
    if (rep.negative_gamma_intervals.empty()) ss << "none\n";
    else {
        for (std::size_t i = 0; i < rep.negative_gamma_intervals.size(); ++i)
            ss << (i ? ", " : "") << "[" << rep.negative_gamma_intervals[i].first << ", "
               << rep.negative_gamma_intervals[i].second << "]";
        ss << "\n";
    }
    if (std::isfinite(rep.first_full_discharge))
        ss << "first full discharge at t = " << rep.first_full_discharge << "\n";
    else
        ss << "the battery never fully discharges within tmax\n";
    ss << "completed discharge-recharge cycles: " << rep.cycle_count << "\n";
    if (std::isfinite(rep.standard_ad_max_rel_dev))
        ss << "flat-rate check: max |gamma - gamma0|/gamma0 on [0.1, 10] = "
           << rep.standard_ad_max_rel_dev << "\n";
    alignment_text(ss, "coherence bound extrema vs coherent-ergotropy extrema:", rep.csl_vs_wc);
    alignment_text(ss, "relative-purity bound extrema vs instantaneous-power extrema:",
                   rep.relpurity_vs_power);
    alignment_text(ss, "Fisher bound extrema vs ergotropy extrema:", rep.fisher_vs_cycles);
    return ss.str();
}

std::string report_json(const RegimeReport& rep) {
    nlohmann::json doc;
    doc["regime"] = regime_name(rep.regime);
    doc["standard_ad"] = rep.standard_ad;
    doc["g_zeros"] = rep.g_zeros;
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& [a, b] : rep.negative_gamma_intervals)
        intervals.push_back({a, b});
    doc["negative_gamma_intervals"] = intervals;
    if (std::isfinite(rep.first_full_discharge))
        doc["first_full_discharge"] = rep.first_full_discharge;
    else
        doc["first_full_discharge"] = nullptr;
    doc["cycle_count"] = rep.cycle_count;
    if (std::isfinite(rep.standard_ad_max_rel_dev))
        doc["standard_ad_max_rel_dev"] = rep.standard_ad_max_rel_dev;
    else
        doc["standard_ad_max_rel_dev"] = nullptr;
    doc["alignment"]["csl_vs_wc"] = alignment_json(rep.csl_vs_wc);
    doc["alignment"]["relpurity_vs_power"] = alignment_json(rep.relpurity_vs_power);
    doc["alignment"]["fisher_vs_cycles"] = alignment_json(rep.fisher_vs_cycles);
    return doc.dump(2);
}

} // namespace qbat::cli
