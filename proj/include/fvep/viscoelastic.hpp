#pragma once

// Fractional viscoelastic constitutive models built from Scott-Blair elements.
//
// Units: stresses in Pa, time in s. Pseudo-constants carry Pa s^beta; nothing
// is enforced at runtime.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fvep/fracmath.hpp"

namespace fvep {

/// sigma = E D^beta eps
struct ScottBlair {
    double E = 1.0;
    double beta = 0.5;

    bool operator==(const ScottBlair&) const = default;
};

/// Two SB elements in parallel.
struct FractionalKelvinVoigt {
    double E1 = 1.0, E2 = 1.0;
    double beta1 = 0.3, beta2 = 0.7;

    bool operator==(const FractionalKelvinVoigt&) const = default;
};

/// Two SB elements in series; beta1 <= beta2 (equality recovers SB).
struct FractionalMaxwell {
    double E1 = 1.0, E2 = 1.0;
    double beta1 = 0.3, beta2 = 0.7;

    bool operator==(const FractionalMaxwell&) const = default;
};

/// A fractional Maxwell branch in parallel with a third SB element.
struct FractionalKelvinZener {
    double E1 = 1.0, E2 = 1.0, E3 = 1.0;
    double beta1 = 0.3, beta2 = 0.7, beta3 = 0.1;

    bool operator==(const FractionalKelvinZener&) const = default;
};

/// A fractional Kelvin-Voigt pair in series with a third SB element.
struct FractionalPoyntingThomson {
    double E1 = 1.0, E2 = 1.0, E3 = 1.0;
    double beta1 = 0.3, beta2 = 0.7, beta3 = 0.1;

    bool operator==(const FractionalPoyntingThomson&) const = default;
};

/// Fung-type quasi-linear model: SB-like reduced relaxation E t^-alpha/Gamma(1-alpha)
/// convolved with the tangent of sigma_e = A (exp(B eps) - 1).
struct FractionalQuasiLinear {
    double E = 1.0;  // s^alpha
    double alpha = 0.3;
    double A = 1.0;  // Pa
    double B = 1.0;

    bool operator==(const FractionalQuasiLinear&) const = default;
};

using MaterialModel = std::variant<ScottBlair, FractionalKelvinVoigt, FractionalMaxwell,
                                   FractionalKelvinZener, FractionalPoyntingThomson,
                                   FractionalQuasiLinear>;

/// Short tag: SB, FKV, FM, FKZ, FPT, FQLV.
std::string_view model_name(const MaterialModel& model);

/// Throws DomainError when parameters or orders are inadmissible.
void validate(const MaterialModel& model);

/// Largest fractional order acting on the strain.
double highest_order(const MaterialModel& model);

/// Model constants C1..C4 (unused slots are zero).
struct DiscretizationConstants {
    std::array<double, 4> c{};
    double operator[](std::size_t i) const { return c[i]; }
};

DiscretizationConstants constants(const MaterialModel& model, double dt);

/// Histories of one material point. All series share the grid and have equal
/// length; index 0 holds the homogeneous initial state.
struct StressState {
    HistorySeries strain;
    HistorySeries strain_ve;
    HistorySeries strain_vp;
    HistorySeries sigma;
    /// exp(B eps_ve_{k+1/2}) (eps_ve_{k+1} - eps_ve_k) for each committed
    /// interval; populated only for the quasi-linear model.
    std::vector<double> tangent_increment;

    static StressState at_rest(double dt, std::size_t reserve = 0);
    /// Index of the newest stored sample.
    std::size_t last() const { return sigma.size() - 1; }
};

/// Newest-interval exponent for the quasi-linear model. Midpoint is the fully
/// implicit update; Explicit freezes it at eps_ve_n as the return map does.
enum class ExponentMode { Midpoint, Explicit };

/// Discrete stress update for one model at a fixed dt. Constants and L1
/// weights are built once for up to `max_steps` steps.
class ViscoelasticStepper {
public:
    ViscoelasticStepper(MaterialModel model, double dt, std::size_t max_steps);

    const MaterialModel& model() const noexcept { return model_; }
    double dt() const noexcept { return dt_; }
    const DiscretizationConstants& constants() const noexcept { return c_; }
    std::size_t max_steps() const noexcept { return max_steps_; }

    /// sigma_{n+1} for candidate viscoelastic strain eps_ve_next, with
    /// n = state.last(). Strain histories run over eps_ve, stress histories
    /// over the stored (corrected) stresses.
    double stress(const StressState& state, double eps_ve_next,
                  ExponentMode mode = ExponentMode::Midpoint) const;

    /// Scaling of the plastic slip in the stress correction.
    double projection_constant(const StressState& state) const;

    /// Append step n+1 to the histories.
    void commit(StressState& state, double strain, double strain_vp, double sigma) const;

private:
    void check_index(const StressState& state) const;

    MaterialModel model_;
    double dt_;
    std::size_t max_steps_;
    DiscretizationConstants c_;
    // Weights in the order the model's update consumes them.
    std::vector<L1Weights> strain_w_;
    std::vector<L1Weights> stress_w_;
};

/// Stress response to a unit step strain; SB, FKV, FM and FKZ only.
double relaxation_modulus(const MaterialModel& model, double t);

/// Closed-form stress of the quasi-linear model under eps(t) = rate * t.
double fqlv_analytic_stress(const FractionalQuasiLinear& p, double t, double rate = 1.0);

}  // namespace fvep
