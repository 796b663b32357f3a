#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "fvep/commands.hpp"

using namespace fvep;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::create_directories(dir);
    const fs::path p = dir / "cfg.json";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("relax writes convergence and trace files plus a manifest") {
    TempDir tmp("fvep_cmd_relax");
    CommandOptions o;
    o.command = "relax";
    o.out = tmp.path;
    o.model = "SB";
    o.dt = {0.625, 0.3125, 0.15625};
    std::ostringstream out, err;
    const CommandResult r = run_command(o, out, err);
    REQUIRE(r.exit_code == 0);
    CHECK(err.str().empty());
    CHECK(fs::exists(tmp.path / "relax_SB_convergence.csv"));
    CHECK(fs::exists(tmp.path / "relax_SB_trace.csv"));
    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(manifest["command"] == "relax");
    CHECK(manifest["files"].size() == 3);
    CHECK(manifest["files"][2] == "manifest.json");
    CHECK(slurp(tmp.path / "relax_SB_convergence.csv").rfind("dt,err_end,err_l2,order_end,order_l2\n", 0) == 0);
    CHECK(out.str().find("relax_SB") != std::string::npos);

    const std::string first = slurp(tmp.path / "relax_SB_convergence.csv");
    REQUIRE(run_command(o, out, err).exit_code == 0);
    CHECK(slurp(tmp.path / "relax_SB_convergence.csv") == first);
}

TEST_CASE("relax rejects models without a relaxation modulus") {
    for (const char* tag : {"FPT", "FQLV"}) {
        CommandOptions o;
        o.command = "relax";
        o.out = fs::temp_directory_path() / "fvep_cmd_never";
        o.model = tag;
        std::ostringstream out, err;
        CHECK(run_command(o, out, err).exit_code == kExitUsage);
        CHECK(err.str().find("unsupported model") != std::string::npos);
        CHECK_FALSE(fs::exists(o.out));
    }
}

TEST_CASE("missing or invalid config is a usage error") {
    CommandOptions o;
    o.command = "monotone";
    o.config = "/nonexistent/fvep.json";
    std::ostringstream out, err;
    CHECK(run_command(o, out, err).exit_code != 0);
    CHECK(err.str().find("cannot open") != std::string::npos);

    TempDir tmp("fvep_cmd_badcfg");
    o.config = write_config(tmp.path, R"({"viscoplastic": {"betaK": 2}})");
    std::ostringstream err2;
    CHECK(run_command(o, out, err2).exit_code == kExitUsage);
    CHECK(err2.str().find("viscoplastic") != std::string::npos);
}

TEST_CASE("unwritable output directory fails") {
    TempDir tmp("fvep_cmd_blocked");
    fs::create_directories(tmp.path);
    const fs::path file = tmp.path / "file";
    std::ofstream(file) << "x";
    CommandOptions o;
    o.command = "relax";
    o.out = file;
    o.model = "SB";
    o.dt = {0.625, 0.3125};
    std::ostringstream out, err;
    CHECK(run_command(o, out, err).exit_code == kExitFailure);
}

TEST_CASE("convergence emits the per-beta table") {
    TempDir tmp("fvep_cmd_conv");
    CommandOptions o;
    o.command = "convergence";
    o.out = tmp.path;
    o.dt = {1.0 / 64, 1.0 / 128};
    o.algorithm = Algorithm::Both;
    std::ostringstream out, err;
    REQUIRE(run_command(o, out, err).exit_code == 0);
    const std::string table = slurp(tmp.path / "convergence_table.csv");
    CHECK(table.rfind("beta,algorithm,dt,err_end,err_l2,order_end,order_l2\n", 0) == 0);
    CHECK(table.find("\n0.9,legacy,0.0078125,") != std::string::npos);
    CHECK(fs::exists(tmp.path / "convergence_beta0.5.csv"));
    CHECK(fs::exists(tmp.path / "convergence_beta0.5_legacy.csv"));

    o.model = "FKV";
    std::ostringstream err2;
    CHECK(run_command(o, out, err2).exit_code == kExitUsage);
}

TEST_CASE("cyclic legacy is limited to SB") {
    CommandOptions o;
    o.command = "cyclic";
    o.model = "FKV";
    o.algorithm = Algorithm::Legacy;
    o.out = fs::temp_directory_path() / "fvep_cmd_never";
    std::ostringstream out, err;
    CHECK(run_command(o, out, err).exit_code == kExitUsage);
    CHECK(err.str().find("SB") != std::string::npos);
}

TEST_CASE("plans follow the documented defaults") {
    CommandOptions o;
    o.command = "cyclic";
    const CommandPlan p = plan_command(o, ConfigFile{});
    REQUIRE(p.experiments.size() == 6);
    const auto& e = p.experiments[3];
    CHECK(std::get<FractionalKelvinZener>(e.model) == FractionalKelvinZener{50, 50, 50, 0.3, 0.7, 0.1});
    CHECK(*e.vp == ViscoplasticParams{1.0, 5.0, 0.7, 0.0});
    CHECK(std::get<Cyclic>(e.load).eps_A == 0.25);
    CHECK(e.dt_list.back() == 1.0 / 4096);
    CHECK(reference_dt(e) == 1.0 / 32768);

    o.command = "relax";
    const CommandPlan r = plan_command(o, ConfigFile{});
    CHECK(r.labels == std::vector<std::string>{"relax_SB", "relax_FKV", "relax_FM", "relax_FKZ"});
    CHECK(r.experiments[0].T == 10.0);
    CHECK(r.experiments[0].dt_list.size() == 7);

    o.command = "bench";
    CHECK(plan_command(o, ConfigFile{}).bench.sizes.front() == 256);

    o.command = "nope";
    CHECK_THROWS_AS(plan_command(o, ConfigFile{}), ConfigError);
}

TEST_CASE("bench flags low-resolution rows") {
    TempDir tmp("fvep_cmd_bench");
    CommandOptions o;
    o.command = "bench";
    o.out = tmp.path;
    o.config = write_config(tmp.path / "in", R"({"run": {"sizes": [64, 128], "repetitions": 1}})");
    std::ostringstream out, err;
    REQUIRE(run_command(o, out, err).exit_code == 0);
    CHECK(out.str().find("low-resolution") != std::string::npos);
    CHECK(slurp(tmp.path / "bench.csv").rfind("N,algorithm,seconds\n64,new,", 0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK_FALSE(manifest["warnings"].empty());
}
