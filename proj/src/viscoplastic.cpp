#include "fvep/viscoplastic.hpp"

#include <cmath>
#include <sstream>

#include "fvep/errors.hpp"

namespace fvep {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

std::size_t weight_span(std::size_t max_steps) { return max_steps == 0 ? 0 : max_steps - 1; }

}  // namespace

void validate(const ViscoplasticParams& p) {
    if (!(p.sigmaY >= 0.0)) throw DomainError("viscoplastic: sigmaY must be >= 0");
    if (!(p.K >= 0.0) || !std::isfinite(p.K)) throw DomainError("viscoplastic: K must be >= 0");
    if (!(p.H >= 0.0) || !std::isfinite(p.H)) throw DomainError("viscoplastic: H must be >= 0");
    FractionalOrder{p.betaK};
}

double k_star(const ViscoplasticParams& p, double dt) {
    return p.K / (std::pow(dt, p.betaK) * std::tgamma(2.0 - p.betaK));
}

PlasticState PlasticState::at_rest(double dt, std::size_t reserve) {
    PlasticState p{HistorySeries(dt, reserve), HistorySeries(dt, reserve)};
    p.alpha.push_back(0.0);
    p.dgamma.push_back(0.0);
    return p;
}

ReturnMapper::ReturnMapper(MaterialModel model, ViscoplasticParams params, double dt,
                           std::size_t max_steps)
    : ve_(std::move(model), dt, max_steps),
      params_(params),
      k_star_(fvep::k_star(params, dt)),
      hardening_w_((validate(params), params.betaK), weight_span(max_steps)) {}

TrialState ReturnMapper::trial_state(const StressState& s, const PlasticState& p,
                                     double eps_next) const {
    const std::size_t n = s.last();
    if (p.alpha.size() != n + 1) throw IndexError("plastic state out of step with stress state");
    TrialState t;
    t.sigma = ve_.stress(s, eps_next - s.strain_vp[n], ExponentMode::Explicit);
    t.f = std::abs(t.sigma) -
          (params_.sigmaY + k_star_ * history_term(p.alpha, hardening_w_, n) + params_.H * p.alpha[n]);
    return t;
}

double ReturnMapper::yield_function(const PlasticState& p, double sigma, double alpha_next) const {
    const std::size_t n = p.alpha.size() - 1;
    return std::abs(sigma) -
           (params_.sigmaY +
            k_star_ * (alpha_next - p.alpha[n] + history_term(p.alpha, hardening_w_, n)) +
            params_.H * alpha_next);
}

StepOutcome ReturnMapper::return_map(const StressState& s, const PlasticState& p,
                                     double eps_next) const {
    const std::size_t n = s.last();
    const TrialState trial = trial_state(s, p, eps_next);
    StepOutcome out;
    out.sigma_trial = trial.sigma;
    out.f_trial = trial.f;
    if (!(trial.f > 0.0)) {
        out.sigma = trial.sigma;
        out.strain_vp = s.strain_vp[n];
        out.alpha = p.alpha[n];
        return out;
    }
    const double c_rm = ve_.projection_constant(s);
    const double denom = c_rm + k_star_ + params_.H;
    if (!(denom > 0.0)) throw InvariantViolation("return map: nonpositive slip denominator");
    const double sgn = sign(trial.sigma);
    out.plastic = true;
    out.dgamma = trial.f / denom;
    out.sigma = trial.sigma - sgn * c_rm * out.dgamma;
    // sign(sigma_{n+1}) = sign(sigma_trial) on the corrected state.
    out.strain_vp = s.strain_vp[n] + sgn * out.dgamma;
    out.alpha = p.alpha[n] + out.dgamma;
    return out;
}

void ReturnMapper::commit(StressState& s, PlasticState& p, double eps_next,
                          const StepOutcome& out) const {
    ve_.commit(s, eps_next, out.strain_vp, out.sigma);
    p.alpha.push_back(out.alpha);
    p.dgamma.push_back(out.dgamma);
}

StepOutcome ReturnMapper::advance(StressState& s, PlasticState& p, double eps_next) const {
    const StepOutcome out = return_map(s, p, eps_next);
    commit(s, p, eps_next, out);
    return out;
}

namespace {

const ScottBlair& require_sb(const MaterialModel& model) {
    const auto* sb = std::get_if<ScottBlair>(&model);
    if (sb == nullptr) {
        std::ostringstream os;
        os << "legacy return map supports an SB viscoelastic part only, got " << model_name(model);
        throw UnsupportedOperation(os.str());
    }
    return *sb;
}

}  // namespace

LegacyReturnMapper::LegacyReturnMapper(MaterialModel model, ViscoplasticParams params, double dt,
                                       std::size_t max_steps)
    : ve_((require_sb(model), std::move(model)), dt, max_steps),
      params_(params),
      e_star_(ve_.constants()[0]),
      k_star_(fvep::k_star(params, dt)),
      viscous_w_(std::get<ScottBlair>(ve_.model()).beta, weight_span(max_steps)),
      hardening_w_((validate(params), params.betaK), weight_span(max_steps)) {}

TrialState LegacyReturnMapper::trial_state(const StressState& s, const PlasticState& p,
                                           double eps_next) const {
    const std::size_t n = s.last();
    if (p.alpha.size() != n + 1) throw IndexError("plastic state out of step with stress state");
    TrialState t;
    t.sigma = ve_.stress(s, eps_next - s.strain_vp[n]);
    t.f = std::abs(t.sigma) -
          (params_.sigmaY + k_star_ * history_term(p.alpha, hardening_w_, n) + params_.H * p.alpha[n]);
    return t;
}

StepOutcome LegacyReturnMapper::return_map(const StressState& s, const PlasticState& p,
                                           double eps_next) const {
    const std::size_t n = s.last();
    const TrialState trial = trial_state(s, p, eps_next);
    StepOutcome out;
    out.sigma_trial = trial.sigma;
    out.f_trial = trial.f;
    if (!(trial.f > 0.0)) {
        // Elastic step: the slip history records a zero increment.
        out.sigma = trial.sigma;
        out.strain_vp = s.strain_vp[n];
        out.alpha = p.alpha[n];
        return out;
    }
    const double prev = p.dgamma[n];
    const double hist_e = history_term(p.dgamma, viscous_w_, n);
    const double hist_k = history_term(p.dgamma, hardening_w_, n);
    const double denom = e_star_ + k_star_ + params_.H;
    if (!(denom > 0.0)) throw InvariantViolation("legacy return map: nonpositive slip denominator");
    const double sgn = sign(trial.sigma);
    out.plastic = true;
    out.dgamma = (e_star_ * (prev - hist_e) + k_star_ * (prev - hist_k) + trial.f) / denom;
    // Correction by the discretized fractional derivative of the slip.
    out.sigma = trial.sigma - sgn * e_star_ * (out.dgamma - prev + hist_e);
    out.strain_vp = s.strain_vp[n] + sgn * out.dgamma;
    out.alpha = p.alpha[n] + out.dgamma;
    return out;
}

void LegacyReturnMapper::commit(StressState& s, PlasticState& p, double eps_next,
                                const StepOutcome& out) const {
    ve_.commit(s, eps_next, out.strain_vp, out.sigma);
    p.alpha.push_back(out.alpha);
    p.dgamma.push_back(out.dgamma);
}

StepOutcome LegacyReturnMapper::advance(StressState& s, PlasticState& p, double eps_next) const {
    const StepOutcome out = return_map(s, p, eps_next);
    commit(s, p, eps_next, out);
    return out;
}

double onset_difference_estimate(const ScottBlair& sb, const ViscoplasticParams& params, double dt,
                                 const HistorySeries& legacy_dgamma, std::size_t m) {
    const L1Weights we(sb.beta, m);
    const L1Weights wk(params.betaK, m);
    const double e_star = sb.E / (std::pow(dt, sb.beta) * std::tgamma(2.0 - sb.beta));
    const double ks = k_star(params, dt);
    const double hist_e = history_term(legacy_dgamma, we, m);
    const double hist_k = history_term(legacy_dgamma, wk, m);
    return e_star / (e_star + ks + params.H) *
           (ks * (hist_e - hist_k) - params.H * (legacy_dgamma.at(m) - hist_e));
}

OnsetDifference onset_difference(const ScottBlair& sb, const ViscoplasticParams& params, double dt,
                                 const HistorySeries& sigma_new, const HistorySeries& dgamma_new,
                                 const HistorySeries& sigma_legacy,
                                 const HistorySeries& dgamma_legacy) {
    auto first_plastic = [](const HistorySeries& dg) {
        for (std::size_t i = 1; i < dg.size(); ++i)
            if (dg[i] > 0.0) return i;
        return dg.size();
    };
    const std::size_t p_new = first_plastic(dgamma_new);
    const std::size_t p_old = first_plastic(dgamma_legacy);
    if (p_new != p_old) {
        std::ostringstream os;
        os << "plastic onset differs: new algorithm at " << p_new << ", legacy at " << p_old;
        throw InvariantViolation(os.str());
    }
    if (p_new + 1 >= sigma_new.size() || p_new + 1 >= sigma_legacy.size())
        throw IndexError("no step after the plastic onset to compare");
    OnsetDifference out;
    out.onset = p_new;
    out.estimate = onset_difference_estimate(sb, params, dt, dgamma_legacy, p_new);
    out.measured = std::abs(sigma_new[p_new + 1] - sigma_legacy[p_new + 1]);
    return out;
}

}  // namespace fvep
