#pragma once

// Fractional visco-plastic device (Coulomb + SB hardening + linear spring)
// coupled to any viscoelastic model, integrated by return mapping.

#include <cstddef>
#include <limits>

#include "fvep/fracmath.hpp"
#include "fvep/viscoelastic.hpp"

namespace fvep {

struct ViscoplasticParams {
    double sigmaY = 0.0;  // initial yield stress, Pa
    double K = 0.0;       // hardening pseudo-constant, Pa s^betaK
    double betaK = 0.5;
    double H = 0.0;  // linear hardening, Pa

    /// A device that never yields.
    bool operator==(const ViscoplasticParams&) const = default;

    static ViscoplasticParams never_yielding() {
        return {std::numeric_limits<double>::infinity(), 0.0, 0.5, 0.0};
    }
};

void validate(const ViscoplasticParams& params);

/// K / (dt^betaK Gamma(2 - betaK))
double k_star(const ViscoplasticParams& params, double dt);

/// Hardening history and plastic-slip increments. The visco-plastic strain
/// itself lives in StressState::strain_vp.
struct PlasticState {
    HistorySeries alpha;
    HistorySeries dgamma;

    static PlasticState at_rest(double dt, std::size_t reserve = 0);
};

struct TrialState {
    double sigma = 0.0;
    double f = 0.0;
};

struct StepOutcome {
    double sigma = 0.0;
    double sigma_trial = 0.0;
    double f_trial = 0.0;
    double dgamma = 0.0;
    double strain_vp = 0.0;  // eps_vp_{n+1}
    double alpha = 0.0;      // alpha_{n+1}
    bool plastic = false;
};

/// Fully discrete return mapping: trial state with frozen internal variables,
/// then a closed-form slip and a projection scaled by the model's constant.
class ReturnMapper {
public:
    ReturnMapper(MaterialModel model, ViscoplasticParams params, double dt, std::size_t max_steps);

    const ViscoelasticStepper& viscoelastic() const noexcept { return ve_; }
    const ViscoplasticParams& params() const noexcept { return params_; }
    double k_star() const noexcept { return k_star_; }

    TrialState trial_state(const StressState& s, const PlasticState& p, double eps_next) const;
    double projection_constant(const StressState& s) const { return ve_.projection_constant(s); }

    /// Discrete yield function at n+1 for a corrected stress and hardening.
    double yield_function(const PlasticState& p, double sigma, double alpha_next) const;

    StepOutcome return_map(const StressState& s, const PlasticState& p, double eps_next) const;
    void commit(StressState& s, PlasticState& p, double eps_next, const StepOutcome& out) const;
    StepOutcome advance(StressState& s, PlasticState& p, double eps_next) const;

private:
    ViscoelasticStepper ve_;
    ViscoplasticParams params_;
    double k_star_;
    L1Weights hardening_w_;
};

/// Semi-discrete algorithm for an SB viscoelastic part, where the plastic
/// slip obeys its own discretized fractional relaxation equation. The slip
/// increments it produces are stored in PlasticState::dgamma.
class LegacyReturnMapper {
public:
    LegacyReturnMapper(MaterialModel model, ViscoplasticParams params, double dt,
                       std::size_t max_steps);

    const ViscoelasticStepper& viscoelastic() const noexcept { return ve_; }
    double e_star() const noexcept { return e_star_; }
    double k_star() const noexcept { return k_star_; }

    TrialState trial_state(const StressState& s, const PlasticState& p, double eps_next) const;
    StepOutcome return_map(const StressState& s, const PlasticState& p, double eps_next) const;
    void commit(StressState& s, PlasticState& p, double eps_next, const StepOutcome& out) const;
    StepOutcome advance(StressState& s, PlasticState& p, double eps_next) const;

private:
    ViscoelasticStepper ve_;
    ViscoplasticParams params_;
    double e_star_;
    double k_star_;
    L1Weights viscous_w_;
    L1Weights hardening_w_;
};

/// Predicted gap between the two algorithms one step after onset, and the
/// gap actually measured.
struct OnsetDifference {
    std::size_t onset = 0;  // p: first plastic index
    double estimate = 0.0;  // signed, for the step p -> p+1
    double measured = 0.0;  // |sigma_{p+1} - sigma_bar_{p+1}|
};

/// Estimate of sigma_{m+1} - sigma_bar_{m+1} from the legacy slip history
/// through index m, for an SB element (E, betaE).
double onset_difference_estimate(const ScottBlair& sb, const ViscoplasticParams& params, double dt,
                                 const HistorySeries& legacy_dgamma, std::size_t m);

/// Locate the common onset p and compare estimate with measurement at p+1.
/// Throws InvariantViolation when the onset indices differ.
OnsetDifference onset_difference(const ScottBlair& sb, const ViscoplasticParams& params, double dt,
                                 const HistorySeries& sigma_new, const HistorySeries& dgamma_new,
                                 const HistorySeries& sigma_legacy,
                                 const HistorySeries& dgamma_legacy);

}  // namespace fvep
