#include "qslbattery/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qslbattery/csv.hpp"
#include "qslbattery/errors.hpp"

namespace qbat::cli {

using nlohmann::json;

const std::vector<std::string>& all_columns() {
    static const std::vector<std::string> cols = {
        "t",      "g",   "gamma", "purity", "c_l1",   "c_relent",
        "w",      "w_i", "w_c",   "p_inst", "p_avg",  "tau_qsl_fisher",
        "tau_qsl_wy", "tau_qsl_relpurity", "tau_csl"};
    return cols;
}

const char* bures_variant_name(BuresVariant v) {
    return v == BuresVariant::Standard ? "standard" : "as_printed";
}

const char* relpurity_mode_name(RelPurityMode m) {
    switch (m) {
    case RelPurityMode::Eq6Coherence: return "eq6_coherence";
    case RelPurityMode::Eq4General: return "eq4_general";
    case RelPurityMode::Eq6InitialCoherence: return "eq6_initial_coherence";
    }
    return "unknown";
}

void RunConfig::validate() const {
    model.validate();
    if (!(tmax > 0.0)) throw ConfigError("tmax must be > 0");
    if (samples < 200 || samples % 2 != 0)
        throw ConfigError("samples must be even and at least 200");
    if (!(epsilon_floor > 0.0) || epsilon_floor > 1e-6)
        throw ConfigError("epsilon_floor must lie in (0, 1e-6]");
    if (quad.n != 0 && quad.n != samples)
        throw ConfigError("quad_n must equal samples (a single grid carries both the "
                          "trajectory and the quadrature)");
    if (quad.singular_guard < 0.0) throw ConfigError("singular_guard must be >= 0");
    if (avg_power_t0 < 0.0 || avg_power_t0 > tmax)
        throw ConfigError("avg_power_t0 must lie in [0, tmax]");
    if (columns.empty()) throw ConfigError("columns must not be empty");
    const auto& known = all_columns();
    std::set<std::string> seen;
    for (const std::string& c : columns) {
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw ConfigError("unknown column '" + c + "'");
        if (!seen.insert(c).second) throw ConfigError("duplicate column '" + c + "'");
    }
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    cfg.columns = all_columns();

    auto take_double = [&](const char* key, double& slot) {
        if (!doc.contains(key)) return;
        const json& v = doc.at(key);
        if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
        slot = v.get<double>();
        doc.erase(key);
    };
    auto take_size = [&](const char* key, std::size_t& slot) {
        if (!doc.contains(key)) return;
        const json& v = doc.at(key);
        if (!v.is_number_unsigned())
            throw ConfigError(std::string(key) + ": expected a nonnegative integer");
        slot = v.get<std::size_t>();
        doc.erase(key);
    };
    auto take_string = [&](const char* key, std::string& slot) {
        if (!doc.contains(key)) return;
        const json& v = doc.at(key);
        if (!v.is_string()) throw ConfigError(std::string(key) + ": expected a string");
        slot = v.get<std::string>();
        doc.erase(key);
    };

    take_double("omega0", cfg.model.omega0);
    take_double("lambda", cfg.model.lambda);
    take_double("gamma0", cfg.model.gamma0);
    take_double("temperature", cfg.model.temperature);

    double cgr = cfg.model.c_g.real(), cgi = cfg.model.c_g.imag();
    double cer = cfg.model.c_e.real(), cei = cfg.model.c_e.imag();
    take_double("c_g_re", cgr);
    take_double("c_g_im", cgi);
    take_double("c_e_re", cer);
    take_double("c_e_im", cei);
    const double norm = std::sqrt(cgr * cgr + cgi * cgi + cer * cer + cei * cei);
    if (!(norm > 0.0)) throw ConfigError("initial amplitudes must not both vanish");
    cfg.model.c_g = Complex(cgr / norm, cgi / norm);
    cfg.model.c_e = Complex(cer / norm, cei / norm);

    take_double("tmax", cfg.tmax);
    take_size("samples", cfg.samples);

    std::string scheme = "simpson";
    take_string("quad_scheme", scheme);
    if (scheme == "simpson") cfg.quad.scheme = QuadScheme::Simpson;
    else if (scheme == "trapezoid") cfg.quad.scheme = QuadScheme::Trapezoid;
    else throw ConfigError("quad_scheme must be 'simpson' or 'trapezoid'");

    std::size_t quad_n = 0;
    take_size("quad_n", quad_n);
    cfg.quad.n = (quad_n == 0) ? cfg.samples : quad_n;
    take_double("singular_guard", cfg.quad.singular_guard);

    take_double("epsilon_floor", cfg.epsilon_floor);

    std::string bures = "standard";
    take_string("bures_variant", bures);
    if (bures == "standard") cfg.bures_variant = BuresVariant::Standard;
    else if (bures == "as_printed") cfg.bures_variant = BuresVariant::AsPrinted;
    else throw ConfigError("bures_variant must be 'standard' or 'as_printed'");

    std::string mode = "eq6_coherence";
    take_string("relpurity_mode", mode);
    if (mode == "eq6_coherence") cfg.relpurity_mode = RelPurityMode::Eq6Coherence;
    else if (mode == "eq4_general") cfg.relpurity_mode = RelPurityMode::Eq4General;
    else if (mode == "eq6_initial_coherence")
        cfg.relpurity_mode = RelPurityMode::Eq6InitialCoherence;
    else
        throw ConfigError("relpurity_mode must be 'eq6_coherence', 'eq4_general' or "
                          "'eq6_initial_coherence'");

    take_double("avg_power_t0", cfg.avg_power_t0);

    if (doc.contains("columns")) {
        const json& v = doc.at("columns");
        cfg.columns.clear();
        if (v.is_string()) {
            std::stringstream ss(v.get<std::string>());
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) cfg.columns.push_back(item);
            }
        } else if (v.is_array()) {
            for (const json& e : v) {
                if (!e.is_string()) throw ConfigError("columns: expected strings");
                cfg.columns.push_back(e.get<std::string>());
            }
        } else {
            throw ConfigError("columns: expected an array or a comma-separated string");
        }
        doc.erase("columns");
    }

    take_string("out_path", cfg.out_path);

    if (!doc.empty()) {
        std::string keys;
        for (const auto& kv : doc.items()) keys += (keys.empty() ? "" : ", ") + kv.key();
        throw ConfigError("unknown config keys: " + keys);
    }

    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json doc;
    doc["version"] = "qslbattery 1.0.0";
    doc["omega0"] = cfg.model.omega0;
    doc["lambda"] = cfg.model.lambda;
    doc["gamma0"] = cfg.model.gamma0;
    doc["temperature"] = cfg.model.temperature;
    doc["c_g_re"] = cfg.model.c_g.real();
    doc["c_g_im"] = cfg.model.c_g.imag();
    doc["c_e_re"] = cfg.model.c_e.real();
    doc["c_e_im"] = cfg.model.c_e.imag();
    doc["tmax"] = cfg.tmax;
    doc["samples"] = cfg.samples;
    doc["quad_scheme"] = cfg.quad.scheme == QuadScheme::Simpson ? "simpson" : "trapezoid";
    doc["quad_n"] = cfg.quad.n == 0 ? cfg.samples : cfg.quad.n;
    doc["singular_guard"] = cfg.quad.singular_guard;
    doc["epsilon_floor"] = cfg.epsilon_floor;
    doc["bures_variant"] = bures_variant_name(cfg.bures_variant);
    doc["relpurity_mode"] = relpurity_mode_name(cfg.relpurity_mode);
    doc["avg_power_t0"] = cfg.avg_power_t0;
    doc["columns"] = cfg.columns;
    doc["regime"] = regime_name(coupling_regime(cfg.model));
    return doc.dump();
}

} // namespace qbat::cli
