#include "fvep/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "fvep/errors.hpp"

namespace fvep {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) fail(where + "." + key, "unknown key");
}

double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    fail(where, "expected a number");
}

double get(const json& obj, const std::string& where, const char* key, double fallback) {
    const auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, where + "." + key);
}

json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::string string_of(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

}  // namespace

MaterialModel default_model(const std::string& tag, double modulus) {
    const double m = modulus;
    if (tag == "SB") return ScottBlair{m, 0.3};
    if (tag == "FKV") return FractionalKelvinVoigt{m, m, 0.3, 0.7};
    if (tag == "FM") return FractionalMaxwell{m, m, 0.3, 0.7};
    if (tag == "FKZ") return FractionalKelvinZener{m, m, m, 0.3, 0.7, 0.1};
    if (tag == "FPT") return FractionalPoyntingThomson{m, m, m, 0.3, 0.7, 0.1};
    if (tag == "FQLV") return FractionalQuasiLinear{m, 0.3, 1.0, 1.0};
    throw ConfigError("model.type: unknown model '" + tag + "' (SB, FKV, FM, FKZ, FPT, FQLV)");
}

MaterialModel model_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto t = j.find("type");
    if (t == j.end()) fail(where + ".type", "missing");
    const std::string tag = string_of(*t, where + ".type");
    MaterialModel model = default_model(tag);
    std::visit(Overloaded{
                   [&](ScottBlair& m) {
                       check_keys(j, where, {"type", "E", "beta"});
                       m.E = get(j, where, "E", m.E);
                       m.beta = get(j, where, "beta", m.beta);
                   },
                   [&](FractionalKelvinVoigt& m) {
                       check_keys(j, where, {"type", "E1", "E2", "beta1", "beta2"});
                       m.E1 = get(j, where, "E1", m.E1);
                       m.E2 = get(j, where, "E2", m.E2);
                       m.beta1 = get(j, where, "beta1", m.beta1);
                       m.beta2 = get(j, where, "beta2", m.beta2);
                   },
                   [&](FractionalMaxwell& m) {
                       check_keys(j, where, {"type", "E1", "E2", "beta1", "beta2"});
                       m.E1 = get(j, where, "E1", m.E1);
                       m.E2 = get(j, where, "E2", m.E2);
                       m.beta1 = get(j, where, "beta1", m.beta1);
                       m.beta2 = get(j, where, "beta2", m.beta2);
                   },
                   [&](FractionalKelvinZener& m) {
                       check_keys(j, where, {"type", "E1", "E2", "E3", "beta1", "beta2", "beta3"});
                       m.E1 = get(j, where, "E1", m.E1);
                       m.E2 = get(j, where, "E2", m.E2);
                       m.E3 = get(j, where, "E3", m.E3);
                       m.beta1 = get(j, where, "beta1", m.beta1);
                       m.beta2 = get(j, where, "beta2", m.beta2);
                       m.beta3 = get(j, where, "beta3", m.beta3);
                   },
                   [&](FractionalPoyntingThomson& m) {
                       check_keys(j, where, {"type", "E1", "E2", "E3", "beta1", "beta2", "beta3"});
                       m.E1 = get(j, where, "E1", m.E1);
                       m.E2 = get(j, where, "E2", m.E2);
                       m.E3 = get(j, where, "E3", m.E3);
                       m.beta1 = get(j, where, "beta1", m.beta1);
                       m.beta2 = get(j, where, "beta2", m.beta2);
                       m.beta3 = get(j, where, "beta3", m.beta3);
                   },
                   [&](FractionalQuasiLinear& m) {
                       check_keys(j, where, {"type", "E", "alpha", "A", "B"});
                       m.E = get(j, where, "E", m.E);
                       m.alpha = get(j, where, "alpha", m.alpha);
                       m.A = get(j, where, "A", m.A);
                       m.B = get(j, where, "B", m.B);
                   },
               },
               model);
    try {
        validate(model);
    } catch (const DomainError& e) {
        fail(where, e.what());
    }
    return model;
}

json to_json(const MaterialModel& model) {
    return std::visit(
        Overloaded{
            [](const ScottBlair& m) { return json{{"type", "SB"}, {"E", m.E}, {"beta", m.beta}}; },
            [](const FractionalKelvinVoigt& m) {
                return json{{"type", "FKV"}, {"E1", m.E1}, {"E2", m.E2}, {"beta1", m.beta1}, {"beta2", m.beta2}};
            },
            [](const FractionalMaxwell& m) {
                return json{{"type", "FM"}, {"E1", m.E1}, {"E2", m.E2}, {"beta1", m.beta1}, {"beta2", m.beta2}};
            },
            [](const FractionalKelvinZener& m) {
                return json{{"type", "FKZ"}, {"E1", m.E1},       {"E2", m.E2},       {"E3", m.E3},
                            {"beta1", m.beta1}, {"beta2", m.beta2}, {"beta3", m.beta3}};
            },
            [](const FractionalPoyntingThomson& m) {
                return json{{"type", "FPT"}, {"E1", m.E1},       {"E2", m.E2},       {"E3", m.E3},
                            {"beta1", m.beta1}, {"beta2", m.beta2}, {"beta3", m.beta3}};
            },
            [](const FractionalQuasiLinear& m) {
                return json{{"type", "FQLV"}, {"E", m.E}, {"alpha", m.alpha}, {"A", m.A}, {"B", m.B}};
            },
        },
        model);
}

ConfigFile parse_config(const json& doc) {
    check_keys(doc, "config", {"model", "viscoplastic", "load", "grid", "run"});
    ConfigFile cfg;

    if (const auto it = doc.find("model"); it != doc.end()) cfg.model = model_from_json(*it);

    if (const auto it = doc.find("viscoplastic"); it != doc.end()) {
        const json& v = *it;
        check_keys(v, "viscoplastic", {"sigmaY", "K", "betaK", "H"});
        ViscoplasticParams p;
        p.sigmaY = get(v, "viscoplastic", "sigmaY", 0.0);
        p.K = get(v, "viscoplastic", "K", 0.0);
        p.betaK = get(v, "viscoplastic", "betaK", 0.5);
        p.H = get(v, "viscoplastic", "H", 0.0);
        try {
            validate(p);
        } catch (const DomainError& e) {
            fail("viscoplastic", e.what());
        }
        cfg.viscoplastic = p;
    }

    if (const auto it = doc.find("load"); it != doc.end()) {
        const json& l = *it;
        if (!l.is_object()) fail("load", "expected an object");
        const auto t = l.find("type");
        if (t == l.end()) fail("load.type", "missing");
        const std::string type = string_of(*t, "load.type");
        if (type == "step") {
            check_keys(l, "load", {"type", "eps0"});
            cfg.load = StepStrain{get(l, "load", "eps0", 1.0)};
        } else if (type == "ramp") {
            check_keys(l, "load", {"type", "eps_T", "T", "exponent"});
            PowerRamp r;
            r.eps_T = get(l, "load", "eps_T", r.eps_T);
            r.T = get(l, "load", "T", r.T);
            const double e = get(l, "load", "exponent", r.exponent);
            if (e != 1.0 && e != 3.0) fail("load.exponent", "must be 1 or 3");
            r.exponent = static_cast<int>(e);
            cfg.load = r;
        } else if (type == "cyclic") {
            check_keys(l, "load", {"type", "eps_A", "omega"});
            Cyclic c;
            c.eps_A = get(l, "load", "eps_A", c.eps_A);
            c.omega = get(l, "load", "omega", c.omega);
            cfg.load = c;
        } else {
            fail("load.type", "unknown load '" + type + "' (step, ramp, cyclic)");
        }
        try {
            validate(*cfg.load);
        } catch (const DomainError& e) {
            fail("load", e.what());
        }
    }

    if (const auto it = doc.find("grid"); it != doc.end()) {
        const json& g = *it;
        check_keys(g, "grid", {"T", "dt", "dt_ref"});
        if (g.contains("T")) {
            cfg.T = number(g["T"], "grid.T");
            if (!(*cfg.T > 0.0)) fail("grid.T", "must be > 0");
        }
        if (g.contains("dt")) {
            cfg.dt = number_list(g["dt"], "grid.dt");
            for (std::size_t i = 0; i < cfg.dt.size(); ++i)
                if (!(cfg.dt[i] > 0.0)) fail("grid.dt[" + std::to_string(i) + "]", "must be > 0");
        }
        if (g.contains("dt_ref")) {
            cfg.dt_ref = number(g["dt_ref"], "grid.dt_ref");
            if (!(*cfg.dt_ref > 0.0)) fail("grid.dt_ref", "must be > 0");
        }
    }

    if (const auto it = doc.find("run"); it != doc.end()) {
        const json& r = *it;
        check_keys(r, "run", {"algorithm", "reference", "models", "betas", "sizes", "repetitions"});
        if (r.contains("algorithm")) {
            try {
                cfg.algorithm = parse_algorithm(string_of(r["algorithm"], "run.algorithm"));
            } catch (const DomainError& e) {
                fail("run.algorithm", e.what());
            }
        }
        if (r.contains("reference")) {
            const std::string ref = string_of(r["reference"], "run.reference");
            if (ref != "analytic" && ref != "self_refined")
                fail("run.reference", "must be 'analytic' or 'self_refined'");
            cfg.reference = ref;
        }
        if (r.contains("models")) {
            const json& m = r["models"];
            if (!m.is_array()) fail("run.models", "expected an array of model tags");
            for (std::size_t i = 0; i < m.size(); ++i) {
                const std::string where = "run.models[" + std::to_string(i) + "]";
                const std::string tag = string_of(m[i], where);
                try {
                    default_model(tag);
                } catch (const ConfigError&) {
                    fail(where, "unknown model '" + tag + "'");
                }
                cfg.run.models.push_back(tag);
            }
        }
        if (r.contains("betas")) {
            cfg.run.betas = number_list(r["betas"], "run.betas");
            for (std::size_t i = 0; i < cfg.run.betas.size(); ++i)
                if (!(cfg.run.betas[i] > 0.0 && cfg.run.betas[i] < 1.0))
                    fail("run.betas[" + std::to_string(i) + "]", "must lie in (0,1)");
        }
        if (r.contains("sizes")) {
            const auto sizes = number_list(r["sizes"], "run.sizes");
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                if (!(sizes[i] >= 1.0) || sizes[i] != std::floor(sizes[i]))
                    fail("run.sizes[" + std::to_string(i) + "]", "must be a positive integer");
                cfg.run.sizes.push_back(static_cast<std::size_t>(sizes[i]));
            }
        }
        if (r.contains("repetitions")) {
            const double reps = number(r["repetitions"], "run.repetitions");
            if (!(reps >= 1.0) || reps != std::floor(reps)) fail("run.repetitions", "must be a positive integer");
            cfg.run.repetitions = static_cast<int>(reps);
        }
    }
    return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ConfigFile& cfg) {
    json doc = json::object();
    if (cfg.model) doc["model"] = to_json(*cfg.model);
    if (cfg.viscoplastic) {
        const auto& p = *cfg.viscoplastic;
        doc["viscoplastic"] = {{"sigmaY", number_json(p.sigmaY)}, {"K", p.K}, {"betaK", p.betaK}, {"H", p.H}};
    }
    if (cfg.load) {
        doc["load"] = std::visit(
            Overloaded{
                [](const StepStrain& s) { return json{{"type", "step"}, {"eps0", s.eps0}}; },
                [](const PowerRamp& r) {
                    return json{{"type", "ramp"}, {"eps_T", r.eps_T}, {"T", r.T}, {"exponent", r.exponent}};
                },
                [](const Cyclic& c) { return json{{"type", "cyclic"}, {"eps_A", c.eps_A}, {"omega", c.omega}}; },
            },
            *cfg.load);
    }
    json grid = json::object();
    if (cfg.T) grid["T"] = *cfg.T;
    if (!cfg.dt.empty()) grid["dt"] = cfg.dt;
    if (cfg.dt_ref) grid["dt_ref"] = *cfg.dt_ref;
    if (!grid.empty()) doc["grid"] = grid;

    json run = json::object();
    if (cfg.algorithm) run["algorithm"] = std::string(to_string(*cfg.algorithm));
    if (cfg.reference) run["reference"] = *cfg.reference;
    if (!cfg.run.models.empty()) run["models"] = cfg.run.models;
    if (!cfg.run.betas.empty()) run["betas"] = cfg.run.betas;
    if (!cfg.run.sizes.empty()) run["sizes"] = cfg.run.sizes;
    if (cfg.run.repetitions != 5) run["repetitions"] = cfg.run.repetitions;
    if (!run.empty()) doc["run"] = run;
    return doc;
}

}  // namespace fvep
