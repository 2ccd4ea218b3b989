#pragma once

#include <string>
#include <vector>

#include "qslbattery/config.hpp"
#include "qslbattery/csv.hpp"
#include "qslbattery/qsl.hpp"
#include "qslbattery/thermo.hpp"

namespace qbat::cli {

struct SweepOutput {
    CsvTable table;          // full column set in canonical order
    bool stationary = false;
    bool singular_integrand = false;
    std::vector<std::string> notes;  // reasons behind any "nan" sentinels etc.
};

/// Evaluates the trajectory, the thermodynamic series, the powers and the
/// four speed-limit times on one grid; deterministic for a fixed config.
SweepOutput run_sweep(const RunConfig& config);

/// Restrict/reorder to the configured column subset.
CsvTable select_columns(const CsvTable& table, const std::vector<std::string>& columns);

/// Writes fig<id>.csv (and a gnuplot stub fig<id>.gp) into out_dir with the
/// parameter set and column selection of the given figure. Throws UsageError
/// for ids outside 1..5.
std::vector<std::string> figure_preset(int id, const std::string& out_dir);

struct AlignmentRow {
    double t;           // refined extremum position of the probe series
    bool is_max;
    double partner_t;   // nearest extremum of the partner series
    bool partner_is_max;
    double distance_in_steps;
    bool matched;       // kind rule satisfied and within the stated distance
};

struct RegimeReport {
    Regime regime;
    bool standard_ad;
    std::vector<double> g_zeros;  // first three zeros within tmax
    std::vector<std::pair<double, double>> negative_gamma_intervals;
    double first_full_discharge;  // NaN when the battery never fully empties
    int cycle_count;              // completed discharge-recharge cycles
    double standard_ad_max_rel_dev;  // max |gamma - gamma0|/gamma0 on [0.1, 10]; NaN if n/a
    std::vector<AlignmentRow> csl_vs_wc;          // tau_csl extrema against W_c extrema
    std::vector<AlignmentRow> relpurity_vs_power; // tau' extrema against P(t) extrema
    std::vector<AlignmentRow> fisher_vs_cycles;   // tau_qsl extrema against W extrema
};

RegimeReport regime_report(const RunConfig& config);
std::string report_text(const RegimeReport& report);
std::string report_json(const RegimeReport& report);

/// Extrema pairing used by the report and the acceptance checks: each probe
/// extremum is matched with the nearest partner extremum; `same_kind` selects
/// the expected kind rule; `max_steps` the allowed distance in grid spacings.
std::vector<AlignmentRow> align_extrema(const std::vector<Extremum>& probe,
                                        const std::vector<Extremum>& partner, bool same_kind,
                                        double step, double max_steps);

} // namespace qbat::cli
