#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <doctest.h>

#include "fvep/config.hpp"

using namespace fvep;
using nlohmann::json;

namespace {

std::string diagnostic(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config round trip") {
    const json doc = json::parse(R"({
        "model": {"type": "FKZ", "E1": 50, "E2": 40, "E3": 30, "beta1": 0.3, "beta2": 0.7, "beta3": 0.1},
        "viscoplastic": {"sigmaY": "inf", "K": 5, "betaK": 0.7, "H": 0.25},
        "load": {"type": "cyclic", "eps_A": 0.25, "omega": 60},
        "grid": {"T": 1, "dt": [0.0078125, 0.00390625], "dt_ref": 0.0001220703125},
        "run": {"algorithm": "both", "reference": "self_refined", "models": ["SB", "FQLV"],
                "betas": [0.1, 0.5], "sizes": [256, 512], "repetitions": 3}
    })");
    const ConfigFile a = parse_config(doc);
    REQUIRE(a.viscoplastic);
    CHECK(a.viscoplastic->sigmaY == std::numeric_limits<double>::infinity());
    CHECK(std::get<FractionalKelvinZener>(*a.model).E3 == 30);
    CHECK(std::get<Cyclic>(*a.load).omega == 60);
    CHECK(a.run.sizes == std::vector<std::size_t>{256, 512});
    const ConfigFile b = parse_config(json::parse(to_json(a).dump()));
    CHECK(a == b);
    CHECK(to_json(a) == to_json(b));

    for (const char* tag : {"SB", "FKV", "FM", "FPT", "FQLV"}) {
        ConfigFile c;
        c.model = default_model(tag, 3.0);
        CHECK(parse_config(to_json(c)) == c);
    }
    for (const LoadingProgram& l : {LoadingProgram{PowerRamp{2.0, 3.0, 1}}, LoadingProgram{StepStrain{0.5}}}) {
        ConfigFile c;
        c.load = l;
        CHECK(parse_config(to_json(c)) == c);
    }
}

TEST_CASE("omitted keys take defaults") {
    const ConfigFile c = parse_config(json::parse(R"({"model": {"type": "SB", "E": 7}})"));
    CHECK(std::get<ScottBlair>(*c.model).E == 7);
    CHECK(std::get<ScottBlair>(*c.model).beta == 0.3);
    CHECK_FALSE(c.viscoplastic);
    CHECK(parse_config(json::object()) == ConfigFile{});
}

TEST_CASE("field-level diagnostics") {
    CHECK(diagnostic(json::parse(R"({"model": {"type": "SB", "Ee": 1}})")).find("model.Ee") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"model": {"type": "XYZ"}})")).find("model.type") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"model": {"E": 1}})")).find("model.type") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"model": {"type": "SB", "beta": 1.5}})")).find("beta") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"viscoplastic": {"K": "five"}})")).find("viscoplastic.K") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"viscoplastic": {"H": -1}})")).find("viscoplastic") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"grid": {"dt": [0.1, -0.1]}})")).find("grid.dt[1]") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"grid": {"T": 0}})")).find("grid.T") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"load": {"type": "ramp", "exponent": 2}})")).find("load.exponent") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"load": {"type": "cyclic", "omega": 0}})")).find("load") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"run": {"algorithm": "fast"}})")).find("run.algorithm") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"run": {"models": ["SB", "XX"]}})")).find("run.models[1]") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"run": {"sizes": [12.5]}})")).find("run.sizes[0]") != std::string::npos);
    CHECK(diagnostic(json::parse(R"({"extra": {}})")).find("config.extra") != std::string::npos);
    CHECK(diagnostic(json::parse(R"([1, 2])")).find("config") != std::string::npos);
}

TEST_CASE("config files") {
    CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.json"), ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "fvep_bad_config.json";
    {
        std::ofstream f(path);
        f << "{ \"model\": ";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    {
        std::ofstream f(path);
        f << R"({"model": {"type": "FM", "E1": 2}})";
    }
    CHECK(std::get<FractionalMaxwell>(*load_config(path).model).E1 == 2);
    std::filesystem::remove(path);
}
