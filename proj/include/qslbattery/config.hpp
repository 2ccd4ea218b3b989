#pragma once

#include <string>
#include <vector>

#include "qslbattery/dynamics.hpp"
#include "qslbattery/qsl.hpp"

namespace qbat::cli {

/// All sweep-relevant columns, in emission order.
const std::vector<std::string>& all_columns();

/// Resolved run configuration. Defaults reproduce the strongly coupled preset
/// (omega0 = 1, lambda = 0.5, gamma0 = 10, T = 1) over [0, 3].
struct RunConfig {
    ModelParams model;
    double tmax = 3.0;
    std::size_t samples = 3000;
    QuadratureSpec quad;  // n resolved to samples
    double epsilon_floor = 1e-12;
    BuresVariant bures_variant = BuresVariant::Standard;
    RelPurityMode relpurity_mode = RelPurityMode::Eq6Coherence;
    double avg_power_t0 = 0.0;
    std::vector<std::string> columns = all_columns();  // emission subset, never empty
    std::string out_path;

    void validate() const;  // throws ConfigError
};

/// Flat key/value JSON document; unknown keys are rejected, omitted keys get
/// defaults, (c_g, c_e) are renormalized. Throws ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

/// Resolved configuration as a single-line JSON object (CSV metadata header).
std::string config_to_json(const RunConfig& config);

const char* bures_variant_name(BuresVariant v);
const char* relpurity_mode_name(RelPurityMode m);

} // namespace qbat::cli
