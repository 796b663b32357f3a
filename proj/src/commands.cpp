#include "fvep/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fvep/errors.hpp"

namespace fvep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> halvings(double first, int count) {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) v.push_back(std::ldexp(first, -i));
    return v;
}

const std::vector<std::string> kAllModels = {"SB", "FKV", "FM", "FKZ", "FPT", "FQLV"};

std::vector<std::string> model_tags(const CommandOptions& o, const ConfigFile& c,
                                    const std::vector<std::string>& fallback) {
    if (o.model) {
        default_model(*o.model);  // rejects unknown tags
        return {*o.model};
    }
    if (c.model) return {std::string(model_name(*c.model))};
    if (!c.run.models.empty()) return c.run.models;
    return fallback;
}

MaterialModel model_for(const std::string& tag, const ConfigFile& c, double modulus) {
    if (c.model && model_name(*c.model) == tag) return *c.model;
    return default_model(tag, modulus);
}

std::optional<Algorithm> algorithm_of(const CommandOptions& o, const ConfigFile& c) {
    if (o.algorithm) return o.algorithm;
    return c.algorithm;
}

ReferenceKind reference_of(const ConfigFile& c, bool analytic_default) {
    const bool analytic = c.reference ? *c.reference == "analytic" : analytic_default;
    if (analytic) return AnalyticReference{};
    return SelfRefinedReference{c.dt_ref.value_or(0.0)};
}

struct Grid {
    double T;
    std::vector<double> dt;
};

Grid grid_of(const CommandOptions& o, const ConfigFile& c, double T_default,
             std::vector<double> dt_default) {
    Grid g{c.T.value_or(T_default), {}};
    if (!o.dt.empty())
        g.dt = o.dt;
    else if (!c.dt.empty())
        g.dt = c.dt;
    else
        g.dt = std::move(dt_default);
    return g;
}

// Appends one experiment per algorithm; legacy runs exist for SB only.
void add_runs(CommandPlan& plan, ExperimentConfig base, const std::string& label,
              std::optional<Algorithm> algo) {
    const Algorithm a = algo.value_or(Algorithm::New);
    const bool sb = std::holds_alternative<ScottBlair>(base.model);
    if (!base.vp || a == Algorithm::New) {
        base.algorithm = Algorithm::New;
        plan.experiments.push_back(base);
        plan.labels.push_back(label);
        return;
    }
    if (a == Algorithm::Legacy && !sb)
        throw UnsupportedOperation("--algorithm legacy: the legacy return map supports SB only, got " +
                                   std::string(model_name(base.model)));
    if (a == Algorithm::Both) {
        base.algorithm = Algorithm::New;
        plan.experiments.push_back(base);
        plan.labels.push_back(label);
        if (!sb) return;
    }
    base.algorithm = Algorithm::Legacy;
    plan.experiments.push_back(base);
    plan.labels.push_back(label + "_legacy");
}

CommandPlan plan_relax(const CommandOptions& o, const ConfigFile& c) {
    if (c.viscoplastic) throw ConfigError("viscoplastic: relax runs viscoelastic models only");
    StepStrain load;
    if (c.load) {
        const auto* s = std::get_if<StepStrain>(&*c.load);
        if (s == nullptr) throw ConfigError("load.type: relax requires a step load");
        load = *s;
    }
    const Grid g = grid_of(o, c, 10.0, {});
    const std::vector<double> dt = g.dt.empty() ? halvings(g.T / 16.0, 7) : g.dt;
    CommandPlan plan;
    for (const auto& tag : model_tags(o, c, {"SB", "FKV", "FM", "FKZ"})) {
        if (tag == "FPT" || tag == "FQLV")
            throw UnsupportedOperation("relax: unsupported model " + tag +
                                       ": no closed-form relaxation modulus (use SB, FKV, FM or FKZ)");
        ExperimentConfig e;
        e.model = model_for(tag, c, 1.0);
        e.load = load;
        e.T = g.T;
        e.dt_list = dt;
        e.reference = reference_of(c, true);
        add_runs(plan, e, "relax_" + tag, std::nullopt);
    }
    return plan;
}

CommandPlan plan_monotone(const CommandOptions& o, const ConfigFile& c) {
    const Grid g = grid_of(o, c, 1.0, halvings(1.0 / 16.0, 5));
    LoadingProgram load = PowerRamp{1.0, g.T, 3};
    if (c.load) {
        if (!std::holds_alternative<PowerRamp>(*c.load))
            throw ConfigError("load.type: monotone requires a ramp load");
        load = *c.load;
    }
    CommandPlan plan;
    for (const auto& tag : model_tags(o, c, kAllModels)) {
        ExperimentConfig e;
        e.model = model_for(tag, c, 1.0);
        e.vp = c.viscoplastic;
        e.load = load;
        e.T = g.T;
        e.dt_list = g.dt;
        e.reference = reference_of(c, false);
        add_runs(plan, e, "monotone_" + tag, algorithm_of(o, c));
    }
    return plan;
}

CommandPlan plan_cyclic(const CommandOptions& o, const ConfigFile& c) {
    const Grid g = grid_of(o, c, 1.0, halvings(1.0 / 512.0, 4));
    LoadingProgram load = Cyclic{0.25, 1.0};
    // The generic min(dt)/64 reference is minutes of work here; min(dt)/8
    // already sits an order of magnitude below the finest error.
    ReferenceKind ref = reference_of(c, false);
    if (!c.dt_ref && std::holds_alternative<SelfRefinedReference>(ref))
        ref = SelfRefinedReference{*std::min_element(g.dt.begin(), g.dt.end()) / 8.0};
    if (c.load) {
        if (!std::holds_alternative<Cyclic>(*c.load))
            throw ConfigError("load.type: cyclic requires a cyclic load");
        load = *c.load;
    }
    const ViscoplasticParams vp = c.viscoplastic.value_or(ViscoplasticParams{1.0, 5.0, 0.7, 0.0});
    CommandPlan plan;
    for (const auto& tag : model_tags(o, c, kAllModels)) {
        ExperimentConfig e;
        e.model = model_for(tag, c, 50.0);
        e.vp = vp;
        e.load = load;
        e.T = g.T;
        e.dt_list = g.dt;
        e.reference = ref;
        add_runs(plan, e, "cyclic_" + tag, algorithm_of(o, c));
    }
    return plan;
}

ScottBlair sb_model(const CommandOptions& o, const ConfigFile& c, const char* cmd) {
    const std::string tag = o.model ? *o.model : c.model ? std::string(model_name(*c.model)) : "SB";
    if (tag != "SB")
        throw UnsupportedOperation(std::string(cmd) + ": unsupported model " + tag +
                                   ": the study compares SB visco-elasto-plastic devices");
    if (c.model) return std::get<ScottBlair>(*c.model);
    return ScottBlair{50.0, 0.5};
}

CommandPlan plan_convergence(const CommandOptions& o, const ConfigFile& c) {
    const ScottBlair sb = sb_model(o, c, "convergence");
    const Grid g = grid_of(o, c, 1.0, halvings(1.0 / 512.0, 6));
    LoadingProgram load = PowerRamp{1.0, g.T, 3};
    if (c.load) load = *c.load;
    const ViscoplasticParams base = c.viscoplastic.value_or(ViscoplasticParams{0.0, 5.0, 0.5, 0.0});
    const std::vector<double> betas =
        !c.run.betas.empty() ? c.run.betas : std::vector<double>{0.1, 0.5, 0.9};
    CommandPlan plan;
    for (double beta : betas) {
        ExperimentConfig e;
        e.model = ScottBlair{sb.E, beta};
        ViscoplasticParams vp = base;
        vp.betaK = beta;
        e.vp = vp;
        e.load = load;
        e.T = g.T;
        e.dt_list = g.dt;
        e.reference = reference_of(c, true);
        add_runs(plan, e, "convergence_beta" + num(beta), algorithm_of(o, c));
    }
    return plan;
}

CommandPlan plan_bench(const CommandOptions& o, const ConfigFile& c) {
    ExperimentConfig e;
    e.model = sb_model(o, c, "bench");
    e.vp = c.viscoplastic.value_or(ViscoplasticParams{0.0, 5.0, 0.5, 0.0});
    e.T = c.T.value_or(1.0);
    e.load = c.load.value_or(PowerRamp{1.0, e.T, 3});
    e.algorithm = Algorithm::Both;
    CommandPlan plan;
    plan.bench.repetitions = c.run.repetitions;
    if (!o.dt.empty() || !c.dt.empty()) {
        for (double dt : !o.dt.empty() ? o.dt : c.dt) plan.bench.sizes.push_back(step_count(e.T, dt));
    } else if (!c.run.sizes.empty()) {
        plan.bench.sizes = c.run.sizes;
    } else {
        for (int k = 8; k <= 14; ++k) plan.bench.sizes.push_back(std::size_t{1} << k);
    }
    plan.experiments.push_back(e);
    plan.labels.push_back("bench");
    return plan;
}

void write_file(const fs::path& path, const std::string& contents, CommandResult& result) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << contents;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + path.string());
    result.files.push_back(path);
}

void print_convergence(std::ostream& out, const std::string& label, const ConvergenceReport& r) {
    out << "# " << label << "  model=" << r.model << " load=" << r.load
        << " reference=" << r.reference << '\n';
    out << std::left << std::setw(24) << "dt" << std::setw(24) << "err_end" << std::setw(24)
        << "err_l2" << std::setw(24) << "order_end" << "order_l2" << '\n';
    for (const auto& row : r.rows) {
        out << std::setw(24) << num(row.dt) << std::setw(24) << num(row.err_end) << std::setw(24)
            << num(row.err_l2) << std::setw(24) << (row.order_end ? num(*row.order_end) : "-")
            << (row.order_l2 ? num(*row.order_l2) : "-") << '\n';
    }
    out << std::right;
}

void run_studies(const CommandPlan& plan, const fs::path& dir, std::ostream& out,
                 CommandResult& result) {
    for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
        const ExperimentConfig& e = plan.experiments[i];
        const ConvergenceReport rep = convergence_study(e);
        print_convergence(out, plan.labels[i], rep);

        std::ostringstream csv;
        write_convergence_csv(csv, rep);
        write_file(dir / (plan.labels[i] + "_convergence.csv"), csv.str(), result);

        const double finest = *std::min_element(e.dt_list.begin(), e.dt_list.end());
        std::ostringstream trace;
        write_trace_csv(trace, run_simulation(e, finest));
        write_file(dir / (plan.labels[i] + "_trace.csv"), trace.str(), result);
    }
}

void run_table(const CommandPlan& plan, const fs::path& dir, std::ostream& out, CommandResult& result) {
    // Table-shaped summary: one row per (beta, dt).
    std::ostringstream csv;
    csv << "beta,algorithm,dt,err_end,err_l2,order_end,order_l2\n";
    for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
        const ExperimentConfig& e = plan.experiments[i];
        const ConvergenceReport rep = convergence_study(e);
        print_convergence(out, plan.labels[i], rep);
        std::ostringstream one;
        write_convergence_csv(one, rep);
        write_file(dir / (plan.labels[i] + ".csv"), one.str(), result);
        const double beta = std::get<ScottBlair>(e.model).beta;
        for (const auto& r : rep.rows)
            csv << num(beta) << ',' << to_string(e.algorithm) << ',' << num(r.dt) << ','
                << num(r.err_end) << ',' << num(r.err_l2) << ','
                << (r.order_end ? num(*r.order_end) : "") << ','
                << (r.order_l2 ? num(*r.order_l2) : "") << '\n';
    }
    write_file(dir / "convergence_table.csv", csv.str(), result);
}

void run_bench(const CommandPlan& plan, const fs::path& dir, std::ostream& out,
               CommandResult& result, std::vector<std::string>& warnings) {
    const BenchmarkReport rep = benchmark_algorithms(plan.experiments.front(), plan.bench);
    out << "# bench  model=SB algorithm=both repetitions=" << plan.bench.repetitions << '\n';
    out << std::left << std::setw(10) << "N" << std::setw(10) << "algorithm" << std::setw(24)
        << "seconds" << "flag" << '\n';
    for (const auto& r : rep.rows)
        out << std::setw(10) << r.N << std::setw(10) << to_string(r.algorithm) << std::setw(24)
            << num(r.seconds) << (r.low_resolution ? "low-resolution" : "") << '\n';
    out << std::right;
    out << "slope new=" << num(rep.slope_new) << " legacy=" << num(rep.slope_legacy) << '\n';
    for (std::size_t i = 0; i < rep.speedup.size(); ++i)
        out << "speedup N=" << plan.bench.sizes[i] << " legacy/new=" << num(rep.speedup[i]) << '\n';
    for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
    warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());

    std::ostringstream csv;
    write_benchmark_csv(csv, rep);
    write_file(dir / "bench.csv", csv.str(), result);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"relax", "monotone", "cyclic", "convergence", "bench"};
    return names;
}

CommandPlan plan_command(const CommandOptions& opts, const ConfigFile& cfg) {
    CommandPlan plan;
    if (opts.command == "relax")
        plan = plan_relax(opts, cfg);
    else if (opts.command == "monotone")
        plan = plan_monotone(opts, cfg);
    else if (opts.command == "cyclic")
        plan = plan_cyclic(opts, cfg);
    else if (opts.command == "convergence")
        plan = plan_convergence(opts, cfg);
    else if (opts.command == "bench")
        plan = plan_bench(opts, cfg);
    else
        throw ConfigError("command: unknown command '" + opts.command + "'");
    if (opts.command != "bench")
        for (const auto& e : plan.experiments) {
            try {
                validate(e);
            } catch (const DomainError& ex) {
                throw ConfigError(std::string("grid: ") + ex.what());
            }
        }
    return plan;
}

CommandResult run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    CommandResult result;
    const std::string started = utc_now();
    CommandPlan plan;
    try {
        const ConfigFile cfg = opts.config ? load_config(*opts.config) : ConfigFile{};
        plan = plan_command(opts, cfg);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitUsage;
        return result;
    } catch (const UnsupportedOperation& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitUsage;
        return result;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitUsage;
        return result;
    }

    std::vector<std::string> warnings;
    try {
        fs::create_directories(opts.out);
        if (opts.command == "bench") {
            run_bench(plan, opts.out, out, result, warnings);
        } else if (opts.command == "convergence") {
            run_table(plan, opts.out, out, result);
        } else {
            run_studies(plan, opts.out, out, result);
        }

        json manifest = {
            {"command", opts.command},
            {"config", opts.config ? json(fs::absolute(*opts.config).string()) : json(nullptr)},
            {"output_dir", fs::absolute(opts.out).string()},
            {"version", kVersion},
            {"started_at", started},
            {"finished_at", utc_now()},
            {"warnings", warnings},
        };
        json files = json::array();
        for (const auto& f : result.files) files.push_back(f.filename().string());
        files.push_back("manifest.json");
        manifest["files"] = files;
        write_file(opts.out / "manifest.json", manifest.dump(2) + "\n", result);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitFailure;
        return result;
    }
    result.exit_code = kExitOk;
    return result;
}

}  // namespace fvep
