#pragma once

// Loading programs, the simulation driver, error measures, convergence
// studies and CPU-time benchmarks.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fvep/viscoelastic.hpp"
#include "fvep/viscoplastic.hpp"

namespace fvep {

/// eps(t) = eps0 for t > 0, eps(0) = 0. On a grid the jump falls in the
/// first interval.
struct StepStrain {
    double eps0 = 1.0;

    bool operator==(const StepStrain&) const = default;
};

/// eps(t) = eps_T (t/T)^exponent with exponent 1 or 3.
struct PowerRamp {
    double eps_T = 1.0;
    double T = 1.0;
    int exponent = 3;

    bool operator==(const PowerRamp&) const = default;
};

/// Triangle wave eps(t) = (2 eps_A / pi) asin(sin(2 pi omega t)).
struct Cyclic {
    double eps_A = 0.25;
    double omega = 1.0;  // Hz

    bool operator==(const Cyclic&) const = default;
};

using LoadingProgram = std::variant<StepStrain, PowerRamp, Cyclic>;

void validate(const LoadingProgram& load);
double strain_at(const LoadingProgram& load, double t);
std::string_view load_name(const LoadingProgram& load);

enum class Algorithm { New, Legacy, Both };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct AnalyticReference {
    bool operator==(const AnalyticReference&) const = default;
};
struct SelfRefinedReference {
    double dt_ref = 0.0;  // 0: min(dt_list) / 64

    bool operator==(const SelfRefinedReference&) const = default;
};
using ReferenceKind = std::variant<AnalyticReference, SelfRefinedReference>;

struct ExperimentConfig {
    MaterialModel model = ScottBlair{};
    std::optional<ViscoplasticParams> vp;  // absent: viscoelastic only
    LoadingProgram load = PowerRamp{};
    double T = 1.0;
    std::vector<double> dt_list;
    Algorithm algorithm = Algorithm::New;
    ReferenceKind reference = SelfRefinedReference{};

    bool operator==(const ExperimentConfig&) const = default;
};

/// Number of steps T/dt; throws DomainError unless dt divides T.
std::size_t step_count(double T, double dt);

/// Effective reference step of a self-refined study.
double reference_dt(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

/// Full histories at every grid point t_n = n dt, n = 0..N.
struct SimulationTrace {
    double dt = 0.0;
    std::vector<double> t, strain, stress, eps_ve, eps_vp, alpha, dgamma;
    // Diagnostics, not part of the CSV schema.
    std::vector<double> sigma_trial, f_trial;
    std::vector<char> plastic;

    std::size_t steps() const { return t.empty() ? 0 : t.size() - 1; }
};

SimulationTrace run_simulation(const ExperimentConfig& config, double dt);
SimulationTrace run_simulation(const ExperimentConfig& config, double dt, Algorithm algorithm);

/// Writes `t,strain,stress,eps_ve,eps_vp,alpha,dgamma` with round-trip precision.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

struct ErrorMetrics {
    double err_end = 0.0;
    double err_l2 = 0.0;
};

/// Endpoint and discrete L2 relative stress errors over t_1..t_N. The
/// reference trace may be finer; it is sampled at the coarse grid points.
ErrorMetrics error_metrics(const SimulationTrace& approx, const SimulationTrace& reference);
ErrorMetrics error_metrics(const SimulationTrace& approx,
                           const std::function<double(double)>& reference);

/// Closed-form stress history for the configurations that have one:
/// step strain on SB/FKV/FM/FKZ, the quasi-linear model under a linear ramp,
/// and an SB element with a hardening SB device of the same order under a
/// cubic ramp (sigmaY = H = 0).
std::optional<std::function<double(double)>> analytic_reference(const ExperimentConfig& config);

struct ConvergenceRow {
    double dt = 0.0;
    double err_end = 0.0;
    double err_l2 = 0.0;
    std::optional<double> order_end;
    std::optional<double> order_l2;
};

struct ConvergenceReport {
    std::string model;
    std::string load;
    std::string reference;
    std::vector<ConvergenceRow> rows;
};

/// log(err_coarse / err_fine) / log(dt_coarse / dt_fine)
double observed_order(double dt_coarse, double err_coarse, double dt_fine, double err_fine);

/// One simulation per dt (run concurrently), errors against the configured
/// reference, orders between successive rows.
ConvergenceReport convergence_study(const ExperimentConfig& config);

/// Writes `dt,err_end,err_l2,order_end,order_l2`.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

struct BenchmarkRow {
    std::size_t N = 0;
    Algorithm algorithm = Algorithm::New;
    double seconds = 0.0;
    bool low_resolution = false;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    double slope_new = 0.0;     // log-log fit of time against N
    double slope_legacy = 0.0;
    std::vector<double> speedup;  // legacy / new, per N
    std::vector<std::string> warnings;
};

struct BenchmarkOptions {
    std::vector<std::size_t> sizes;
    int repetitions = 5;
    std::size_t min_reliable_steps = 256;
};

/// Times both algorithms serially on identical grids over [0, config.T].
BenchmarkReport benchmark_algorithms(const ExperimentConfig& config, const BenchmarkOptions& opts);

/// Writes `N,algorithm,seconds`.
void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fvep
