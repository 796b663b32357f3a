#pragma once

// Experiment configuration files.
//
// One JSON document with optional sections `model`, `viscoplastic`, `load`,
// `grid` and `run`. Keys follow the material symbols (E1, beta1, K, betaK,
// sigmaY, H, A, B, eps_A, omega, ...). Omitted sections fall back to the
// defaults of the command being run.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fvep/experiments.hpp"

namespace fvep {

/// Schema violation; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sweep and harness settings from the `run` section.
struct RunOptions {
    std::vector<std::string> models;  // model sweep, by tag
    std::vector<double> betas;        // betaE = betaK sweep
    std::vector<std::size_t> sizes;   // benchmark step counts
    int repetitions = 5;

    bool operator==(const RunOptions&) const = default;
};

struct ConfigFile {
    std::optional<MaterialModel> model;
    std::optional<ViscoplasticParams> viscoplastic;
    std::optional<LoadingProgram> load;
    std::optional<double> T;
    std::vector<double> dt;
    std::optional<double> dt_ref;
    std::optional<Algorithm> algorithm;
    std::optional<std::string> reference;  // "analytic" | "self_refined"
    RunOptions run;

    bool operator==(const ConfigFile&) const = default;
};

ConfigFile parse_config(const nlohmann::json& doc);
ConfigFile load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ConfigFile& cfg);

nlohmann::json to_json(const MaterialModel& model);
MaterialModel model_from_json(const nlohmann::json& j, const std::string& where = "model");

/// Model with the default parameters of the named tag for a given study
/// ("viscoelastic": moduli 1; "plastic": moduli 50).
MaterialModel default_model(const std::string& tag, double modulus = 1.0);

}  // namespace fvep
