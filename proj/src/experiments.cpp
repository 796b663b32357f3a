#include "fvep/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fvep/errors.hpp"

namespace fvep {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Shortest decimal string that parses back to the same double.
std::string round_trip(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool yields(const ExperimentConfig& c) { return c.vp.has_value(); }

}  // namespace

void validate(const LoadingProgram& load) {
    std::visit(Overloaded{
                   [](const StepStrain& s) {
                       if (!std::isfinite(s.eps0)) throw DomainError("step strain: eps0 must be finite");
                   },
                   [](const PowerRamp& r) {
                       if (!(r.T > 0.0)) throw DomainError("power ramp: T must be > 0");
                       if (r.exponent != 1 && r.exponent != 3)
                           throw DomainError("power ramp: exponent must be 1 or 3");
                   },
                   [](const Cyclic& c) {
                       if (!(c.eps_A > 0.0)) throw DomainError("cyclic: eps_A must be > 0");
                       if (!(c.omega > 0.0)) throw DomainError("cyclic: omega must be > 0");
                   },
               },
               load);
}

double strain_at(const LoadingProgram& load, double t) {
    return std::visit(Overloaded{
                          [&](const StepStrain& s) { return t > 0.0 ? s.eps0 : 0.0; },
                          [&](const PowerRamp& r) {
                              const double x = t / r.T;
                              return r.exponent == 1 ? r.eps_T * x : r.eps_T * x * x * x;
                          },
                          [&](const Cyclic& c) {
                              constexpr double pi = std::numbers::pi;
                              return 2.0 * c.eps_A / pi * std::asin(std::sin(2.0 * pi * c.omega * t));
                          },
                      },
                      load);
}

std::string_view load_name(const LoadingProgram& load) {
    return std::visit(Overloaded{
                          [](const StepStrain&) { return std::string_view("step"); },
                          [](const PowerRamp& r) {
                              return r.exponent == 1 ? std::string_view("linear")
                                                     : std::string_view("cubic");
                          },
                          [](const Cyclic&) { return std::string_view("cyclic"); },
                      },
                      load);
}

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::New: return "new";
        case Algorithm::Legacy: return "legacy";
        case Algorithm::Both: return "both";
    }
    return "new";
}

Algorithm parse_algorithm(std::string_view s) {
    if (s == "new") return Algorithm::New;
    if (s == "legacy") return Algorithm::Legacy;
    if (s == "both") return Algorithm::Both;
    throw DomainError("algorithm must be one of new|legacy|both, got '" + std::string(s) + "'");
}

std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("grid: T and dt must be > 0");
    const double ratio = T / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
        std::ostringstream os;
        os << "grid: dt=" << dt << " does not divide T=" << T;
        throw DomainError(os.str());
    }
    return static_cast<std::size_t>(n);
}

double reference_dt(const ExperimentConfig& config) {
    const auto* self = std::get_if<SelfRefinedReference>(&config.reference);
    if (self == nullptr) return 0.0;
    if (self->dt_ref > 0.0) return self->dt_ref;
    if (config.dt_list.empty()) throw DomainError("self-refined reference needs a dt list");
    return *std::min_element(config.dt_list.begin(), config.dt_list.end()) / 64.0;
}

void validate(const ExperimentConfig& config) {
    validate(config.model);
    if (config.vp) validate(*config.vp);
    validate(config.load);
    for (double dt : config.dt_list) step_count(config.T, dt);
    if (std::holds_alternative<SelfRefinedReference>(config.reference) && !config.dt_list.empty()) {
        const double ref = reference_dt(config);
        step_count(config.T, ref);
        const double dmin = *std::min_element(config.dt_list.begin(), config.dt_list.end());
        if (!(ref < dmin)) throw DomainError("self-refined reference: dt_ref must be < min(dt)");
        for (double dt : config.dt_list) step_count(dt, ref);
    }
}

SimulationTrace run_simulation(const ExperimentConfig& config, double dt) {
    return run_simulation(config, dt, config.algorithm == Algorithm::Legacy ? Algorithm::Legacy
                                                                           : Algorithm::New);
}

namespace {

void reserve_trace(SimulationTrace& tr, std::size_t len) {
    for (auto* v : {&tr.t, &tr.strain, &tr.stress, &tr.eps_ve, &tr.eps_vp, &tr.alpha, &tr.dgamma,
                    &tr.sigma_trial, &tr.f_trial})
        v->reserve(len);
    tr.plastic.reserve(len);
}

void record(SimulationTrace& tr, double t, const StressState& s, const PlasticState* p,
            const StepOutcome* out) {
    const std::size_t i = s.last();
    tr.t.push_back(t);
    tr.strain.push_back(s.strain[i]);
    tr.stress.push_back(s.sigma[i]);
    tr.eps_ve.push_back(s.strain_ve[i]);
    tr.eps_vp.push_back(s.strain_vp[i]);
    tr.alpha.push_back(p ? p->alpha[i] : 0.0);
    tr.dgamma.push_back(p ? p->dgamma[i] : 0.0);
    tr.sigma_trial.push_back(out ? out->sigma_trial : s.sigma[i]);
    tr.f_trial.push_back(out ? out->f_trial : 0.0);
    tr.plastic.push_back(out ? static_cast<char>(out->plastic) : 0);
}

template <class Mapper>
void drive_plastic(const Mapper& mapper, const LoadingProgram& load, double dt, std::size_t N,
                   SimulationTrace& tr) {
    StressState s = StressState::at_rest(dt, N + 1);
    PlasticState p = PlasticState::at_rest(dt, N + 1);
    record(tr, 0.0, s, &p, nullptr);
    for (std::size_t n = 0; n < N; ++n) {
        const double t = static_cast<double>(n + 1) * dt;
        const StepOutcome out = mapper.advance(s, p, strain_at(load, t));
        record(tr, t, s, &p, &out);
    }
}

}  // namespace

SimulationTrace run_simulation(const ExperimentConfig& config, double dt, Algorithm algorithm) {
    validate(config.model);
    validate(config.load);
    const std::size_t N = step_count(config.T, dt);
    SimulationTrace tr;
    tr.dt = dt;
    reserve_trace(tr, N + 1);

    if (!yields(config)) {
        const ViscoelasticStepper stepper(config.model, dt, N);
        StressState s = StressState::at_rest(dt, N + 1);
        record(tr, 0.0, s, nullptr, nullptr);
        for (std::size_t n = 0; n < N; ++n) {
            const double t = static_cast<double>(n + 1) * dt;
            const double eps = strain_at(config.load, t);
            stepper.commit(s, eps, 0.0, stepper.stress(s, eps));
            record(tr, t, s, nullptr, nullptr);
        }
        return tr;
    }

    if (algorithm == Algorithm::Legacy) {
        drive_plastic(LegacyReturnMapper(config.model, *config.vp, dt, N), config.load, dt, N, tr);
    } else {
        drive_plastic(ReturnMapper(config.model, *config.vp, dt, N), config.load, dt, N, tr);
    }
    return tr;
}

void write_trace_csv(std::ostream& os, const SimulationTrace& tr) {
    os << "t,strain,stress,eps_ve,eps_vp,alpha,dgamma\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        os << round_trip(tr.t[i]) << ',' << round_trip(tr.strain[i]) << ','
           << round_trip(tr.stress[i]) << ',' << round_trip(tr.eps_ve[i]) << ','
           << round_trip(tr.eps_vp[i]) << ',' << round_trip(tr.alpha[i]) << ','
           << round_trip(tr.dgamma[i]) << '\n';
    }
}

namespace {

ErrorMetrics relative_errors(const std::vector<double>& approx, const std::vector<double>& ref) {
    // Index 0 is the shared homogeneous initial state and is skipped.
    double diff2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t i = 1; i < approx.size(); ++i) {
        const double d = ref[i] - approx[i];
        diff2 += d * d;
        ref2 += ref[i] * ref[i];
    }
    const double end_ref = std::abs(ref.back());
    if (ref2 == 0.0 || end_ref == 0.0)
        throw DomainError("error metric undefined: reference has zero norm");
    return {std::abs(ref.back() - approx.back()) / end_ref, std::sqrt(diff2 / ref2)};
}

}  // namespace

ErrorMetrics error_metrics(const SimulationTrace& approx, const SimulationTrace& reference) {
    const std::size_t stride = step_count(approx.dt, reference.dt);
    if (reference.steps() != stride * approx.steps())
        throw IndexError("reference trace does not cover the approximate trace's grid");
    std::vector<double> sampled(approx.stress.size());
    for (std::size_t i = 0; i < sampled.size(); ++i) sampled[i] = reference.stress[i * stride];
    return relative_errors(approx.stress, sampled);
}

ErrorMetrics error_metrics(const SimulationTrace& approx,
                           const std::function<double(double)>& reference) {
    std::vector<double> ref(approx.stress.size(), 0.0);
    for (std::size_t i = 1; i < ref.size(); ++i) ref[i] = reference(approx.t[i]);
    return relative_errors(approx.stress, ref);
}

std::optional<std::function<double(double)>> analytic_reference(const ExperimentConfig& config) {
    using Fn = std::function<double(double)>;
    const MaterialModel& model = config.model;

    if (const auto* step = std::get_if<StepStrain>(&config.load)) {
        if (config.vp) return std::nullopt;
        if (std::holds_alternative<FractionalPoyntingThomson>(model) ||
            std::holds_alternative<FractionalQuasiLinear>(model))
            return std::nullopt;
        const double eps0 = step->eps0;
        return Fn([model, eps0](double t) { return eps0 * relaxation_modulus(model, t); });
    }

    const auto* ramp = std::get_if<PowerRamp>(&config.load);
    if (ramp == nullptr) return std::nullopt;

    if (const auto* q = std::get_if<FractionalQuasiLinear>(&model)) {
        if (config.vp || ramp->exponent != 1) return std::nullopt;
        const FractionalQuasiLinear p = *q;
        const double rate = ramp->eps_T / ramp->T;
        return Fn([p, rate](double t) { return fqlv_analytic_stress(p, t, rate); });
    }

    // D^beta of eps_T (t/T)^p is eps_T T^-p Gamma(p+1)/Gamma(p+1-beta) t^(p-beta).
    const double p = ramp->exponent;
    const double amp = ramp->eps_T / std::pow(ramp->T, p);
    auto power_law = [amp, p](double E, double beta) {
        const double c = E * amp * std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - beta);
        return Fn([c, p, beta](double t) { return c * std::pow(t, p - beta); });
    };

    if (const auto* sb = std::get_if<ScottBlair>(&model)) {
        if (!config.vp) return power_law(sb->E, sb->beta);
        const ViscoplasticParams& vp = *config.vp;
        // Monotone loading from rest with no yield stress: both SB elements
        // carry the same stress, so the device acts as one SB element of
        // modulus E K / (E + K).
        if (vp.sigmaY == 0.0 && vp.H == 0.0 && vp.betaK == sb->beta && vp.K > 0.0 &&
            ramp->eps_T > 0.0)
            return power_law(sb->E * vp.K / (sb->E + vp.K), sb->beta);
        return std::nullopt;
    }
    if (const auto* kv = std::get_if<FractionalKelvinVoigt>(&model)) {
        if (config.vp) return std::nullopt;
        Fn a = power_law(kv->E1, kv->beta1);
        Fn b = power_law(kv->E2, kv->beta2);
        return Fn([a, b](double t) { return a(t) + b(t); });
    }
    return std::nullopt;
}

double observed_order(double dt_coarse, double err_coarse, double dt_fine, double err_fine) {
    return std::log(err_coarse / err_fine) / std::log(dt_coarse / dt_fine);
}

ConvergenceReport convergence_study(const ExperimentConfig& config) {
    validate(config);
    if (config.dt_list.empty()) throw DomainError("convergence study needs a dt list");

    ConvergenceReport report;
    report.model = std::string(model_name(config.model));
    report.load = std::string(load_name(config.load));

    std::vector<double> dts = config.dt_list;
    std::sort(dts.begin(), dts.end(), std::greater<>());

    std::optional<std::function<double(double)>> exact;
    std::future<SimulationTrace> reference;
    if (std::holds_alternative<AnalyticReference>(config.reference)) {
        exact = analytic_reference(config);
        if (!exact) {
            std::ostringstream os;
            os << "no analytic reference for model " << report.model << " under "
               << report.load << " loading"
               << (config.vp ? " with plasticity" : "");
            throw UnsupportedOperation(os.str());
        }
        report.reference = "analytic";
    } else {
        const double ref_dt = reference_dt(config);
        report.reference = "self_refined:" + round_trip(ref_dt);
        reference = std::async(std::launch::async, [&config, ref_dt] {
            return run_simulation(config, ref_dt);
        });
    }

    std::vector<std::future<SimulationTrace>> runs;
    runs.reserve(dts.size());
    for (double dt : dts)
        runs.push_back(std::async(std::launch::async, [&config, dt] { return run_simulation(config, dt); }));

    SimulationTrace ref_trace;
    if (reference.valid()) ref_trace = reference.get();

    for (std::size_t i = 0; i < dts.size(); ++i) {
        const SimulationTrace tr = runs[i].get();
        const ErrorMetrics m = exact ? error_metrics(tr, *exact) : error_metrics(tr, ref_trace);
        ConvergenceRow row{dts[i], m.err_end, m.err_l2, std::nullopt, std::nullopt};
        if (i > 0) {
            const ConvergenceRow& prev = report.rows.back();
            row.order_end = observed_order(prev.dt, prev.err_end, row.dt, row.err_end);
            row.order_l2 = observed_order(prev.dt, prev.err_l2, row.dt, row.err_l2);
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "dt,err_end,err_l2,order_end,order_l2\n";
    for (const auto& r : report.rows) {
        os << round_trip(r.dt) << ',' << round_trip(r.err_end) << ',' << round_trip(r.err_l2) << ','
           << (r.order_end ? round_trip(*r.order_end) : "") << ','
           << (r.order_l2 ? round_trip(*r.order_l2) : "") << '\n';
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Volatile sink so the optimizer cannot drop a timed run.
volatile double g_sink = 0.0;

double time_once(const ExperimentConfig& config, double dt, Algorithm a) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const SimulationTrace tr = run_simulation(config, dt, a);
    const auto t1 = clock::now();
    g_sink = tr.stress.back();
    return std::chrono::duration<double>(t1 - t0).count();
}

// Median times of both algorithms. Repetitions alternate so that load
// spikes on a shared machine hit both sides alike.
std::pair<double, double> time_pair(const ExperimentConfig& config, double dt, int reps) {
    g_sink = run_simulation(config, dt, Algorithm::New).stress.back();  // warm-up, discarded
    g_sink = run_simulation(config, dt, Algorithm::Legacy).stress.back();
    std::vector<double> a, b;
    a.reserve(reps);
    b.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        a.push_back(time_once(config, dt, Algorithm::New));
        b.push_back(time_once(config, dt, Algorithm::Legacy));
    }
    return {median(std::move(a)), median(std::move(b))};
}

}  // namespace

BenchmarkReport benchmark_algorithms(const ExperimentConfig& config, const BenchmarkOptions& opts) {
    if (!config.vp) throw DomainError("benchmark needs a viscoplastic device");
    if (opts.sizes.empty()) throw DomainError("benchmark needs at least one size");
    if (opts.repetitions < 1) throw DomainError("benchmark needs at least one repetition");
    BenchmarkReport report;
    std::vector<double> n_new, t_new, n_old, t_old;
    for (std::size_t N : opts.sizes) {
        const double dt = config.T / static_cast<double>(N);
        const auto [s_new, s_old] = time_pair(config, dt, opts.repetitions);
        // Below ~50 us per run the steady clock jitter dominates.
        const bool low = N < opts.min_reliable_steps || std::min(s_new, s_old) < 5e-5;
        if (low) {
            std::ostringstream os;
            os << "N=" << N << ": timings below reliable resolution";
            report.warnings.push_back(os.str());
        } else {
            n_new.push_back(static_cast<double>(N));
            t_new.push_back(s_new);
            n_old.push_back(static_cast<double>(N));
            t_old.push_back(s_old);
        }
        report.rows.push_back({N, Algorithm::New, s_new, low});
        report.rows.push_back({N, Algorithm::Legacy, s_old, low});
        report.speedup.push_back(s_old / s_new);
    }
    if (n_new.size() >= 2) {
        report.slope_new = loglog_slope(n_new, t_new);
        report.slope_legacy = loglog_slope(n_old, t_old);
    } else {
        report.warnings.push_back("fewer than two reliable sizes; slopes not fitted");
    }
    return report;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report) {
    os << "N,algorithm,seconds\n";
    for (const auto& r : report.rows)
        os << r.N << ',' << to_string(r.algorithm) << ',' << round_trip(r.seconds) << '\n';
}

}  // namespace fvep
