#include "fvep/viscoelastic.hpp"

#include <cmath>
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

[[noreturn]] void inadmissible(std::string_view model, const std::string& what) {
    std::ostringstream os;
    os << model << ": " << what;
    throw DomainError(os.str());
}

void require_order(std::string_view model, const char* name, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        inadmissible(model, std::string(name) + " must lie in (0,1), got " + std::to_string(beta));
}

void require_nonneg(std::string_view model, const char* name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v))
        inadmissible(model, std::string(name) + " must be >= 0, got " + std::to_string(v));
}

void require_positive(std::string_view model, const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
        inadmissible(model, std::string(name) + " must be > 0, got " + std::to_string(v));
}

// E / (dt^beta Gamma(2 - beta)); beta may be a composite order in [0,1).
double l1_constant(double E, double beta, double dt) {
    return E / (std::pow(dt, beta) * std::tgamma(2.0 - beta));
}

double sb_modulus(double E, double beta, double t) {
    return E * std::pow(t, -beta) / std::tgamma(1.0 - beta);
}

double fm_modulus(double E1, double E2, double beta1, double beta2, double t) {
    if (!(E2 > 0.0)) throw DomainError("FM relaxation modulus requires E2 > 0");
    const double a = beta2 - beta1;
    if (a == 0.0) return sb_modulus(E1 * E2 / (E1 + E2), beta1, t);
    const double z = -(E1 / E2) * std::pow(t, a);
    return E1 * std::pow(t, -beta1) * mittag_leffler(a, 1.0 - beta1, z);
}

}  // namespace

std::string_view model_name(const MaterialModel& model) {
    return std::visit(Overloaded{
                          [](const ScottBlair&) { return std::string_view("SB"); },
                          [](const FractionalKelvinVoigt&) { return std::string_view("FKV"); },
                          [](const FractionalMaxwell&) { return std::string_view("FM"); },
                          [](const FractionalKelvinZener&) { return std::string_view("FKZ"); },
                          [](const FractionalPoyntingThomson&) { return std::string_view("FPT"); },
                          [](const FractionalQuasiLinear&) { return std::string_view("FQLV"); },
                      },
                      model);
}

void validate(const MaterialModel& model) {
    std::visit(Overloaded{
                   [](const ScottBlair& m) {
                       require_nonneg("SB", "E", m.E);
                       require_order("SB", "beta", m.beta);
                   },
                   [](const FractionalKelvinVoigt& m) {
                       require_nonneg("FKV", "E1", m.E1);
                       require_nonneg("FKV", "E2", m.E2);
                       require_order("FKV", "beta1", m.beta1);
                       require_order("FKV", "beta2", m.beta2);
                   },
                   [](const FractionalMaxwell& m) {
                       require_positive("FM", "E1", m.E1);
                       require_nonneg("FM", "E2", m.E2);
                       require_order("FM", "beta1", m.beta1);
                       require_order("FM", "beta2", m.beta2);
                       if (m.beta1 > m.beta2) inadmissible("FM", "requires beta1 <= beta2");
                   },
                   [](const FractionalKelvinZener& m) {
                       require_positive("FKZ", "E1", m.E1);
                       require_nonneg("FKZ", "E2", m.E2);
                       require_nonneg("FKZ", "E3", m.E3);
                       require_order("FKZ", "beta1", m.beta1);
                       require_order("FKZ", "beta2", m.beta2);
                       require_order("FKZ", "beta3", m.beta3);
                       if (m.beta1 > m.beta2) inadmissible("FKZ", "requires beta1 <= beta2");
                       require_order("FKZ", "beta2+beta3-beta1", m.beta2 + m.beta3 - m.beta1);
                   },
                   [](const FractionalPoyntingThomson& m) {
                       require_nonneg("FPT", "E1", m.E1);
                       require_nonneg("FPT", "E2", m.E2);
                       require_positive("FPT", "E3", m.E3);
                       require_order("FPT", "beta1", m.beta1);
                       require_order("FPT", "beta2", m.beta2);
                       require_order("FPT", "beta3", m.beta3);
                       if (!(m.beta3 < m.beta1 && m.beta3 < m.beta2))
                           inadmissible("FPT", "requires beta3 < beta1 and beta3 < beta2");
                   },
                   [](const FractionalQuasiLinear& m) {
                       require_positive("FQLV", "E", m.E);
                       require_positive("FQLV", "A", m.A);
                       require_positive("FQLV", "B", m.B);
                       require_order("FQLV", "alpha", m.alpha);
                   },
               },
               model);
}

double highest_order(const MaterialModel& model) {
    return std::visit(
        Overloaded{
            [](const ScottBlair& m) { return m.beta; },
            [](const FractionalKelvinVoigt& m) { return std::max(m.beta1, m.beta2); },
            [](const FractionalMaxwell& m) { return m.beta2; },
            [](const FractionalKelvinZener& m) { return std::max(m.beta2, m.beta3); },
            [](const FractionalPoyntingThomson& m) { return std::max(m.beta1, m.beta2); },
            [](const FractionalQuasiLinear& m) { return m.alpha; },
        },
        model);
}

DiscretizationConstants constants(const MaterialModel& model, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("constants: dt must be > 0");
    validate(model);
    DiscretizationConstants out;
    auto& c = out.c;
    std::visit(Overloaded{
                   [&](const ScottBlair& m) { c[0] = l1_constant(m.E, m.beta, dt); },
                   [&](const FractionalKelvinVoigt& m) {
                       c[0] = l1_constant(m.E1, m.beta1, dt);
                       c[1] = l1_constant(m.E2, m.beta2, dt);
                   },
                   [&](const FractionalMaxwell& m) {
                       c[0] = l1_constant(m.E2, m.beta2, dt);
                       c[1] = l1_constant(m.E2 / m.E1, m.beta2 - m.beta1, dt);
                   },
                   [&](const FractionalKelvinZener& m) {
                       c[0] = l1_constant(m.E2, m.beta2, dt);
                       c[1] = l1_constant(m.E3, m.beta3, dt);
                       c[2] = l1_constant(m.E2 * m.E3 / m.E1, m.beta2 + m.beta3 - m.beta1, dt);
                       c[3] = l1_constant(m.E2 / m.E1, m.beta2 - m.beta1, dt);
                   },
                   [&](const FractionalPoyntingThomson& m) {
                       c[0] = l1_constant(m.E1, m.beta1, dt);
                       c[1] = l1_constant(m.E2, m.beta2, dt);
                       c[2] = l1_constant(m.E1 / m.E3, m.beta1 - m.beta3, dt);
                       c[3] = l1_constant(m.E2 / m.E3, m.beta2 - m.beta3, dt);
                   },
                   [&](const FractionalQuasiLinear& m) {
                       c[0] = l1_constant(m.E * m.A * m.B, m.alpha, dt);
                   },
               },
               model);
    return out;
}

StressState StressState::at_rest(double dt, std::size_t reserve) {
    StressState s{HistorySeries(dt, reserve), HistorySeries(dt, reserve),
                  HistorySeries(dt, reserve), HistorySeries(dt, reserve), {}};
    s.strain.push_back(0.0);
    s.strain_ve.push_back(0.0);
    s.strain_vp.push_back(0.0);
    s.sigma.push_back(0.0);
    return s;
}

ViscoelasticStepper::ViscoelasticStepper(MaterialModel model, double dt, std::size_t max_steps)
    : model_(std::move(model)), dt_(dt), max_steps_(max_steps), c_(fvep::constants(model_, dt)) {
    // History sums at step n+1 reach weight index n <= max_steps - 1.
    const std::size_t n = max_steps == 0 ? 0 : max_steps - 1;
    std::visit(Overloaded{
                   [&](const ScottBlair& m) { strain_w_.emplace_back(m.beta, n); },
                   [&](const FractionalKelvinVoigt& m) {
                       strain_w_.emplace_back(m.beta1, n);
                       strain_w_.emplace_back(m.beta2, n);
                   },
                   [&](const FractionalMaxwell& m) {
                       strain_w_.emplace_back(m.beta2, n);
                       stress_w_.push_back(L1Weights::composite(m.beta2 - m.beta1, n));
                   },
                   [&](const FractionalKelvinZener& m) {
                       strain_w_.emplace_back(m.beta2, n);
                       strain_w_.emplace_back(m.beta3, n);
                       strain_w_.emplace_back(m.beta2 + m.beta3 - m.beta1, n);
                       stress_w_.push_back(L1Weights::composite(m.beta2 - m.beta1, n));
                   },
                   [&](const FractionalPoyntingThomson& m) {
                       strain_w_.emplace_back(m.beta1, n);
                       strain_w_.emplace_back(m.beta2, n);
                       stress_w_.emplace_back(m.beta1 - m.beta3, n);
                       stress_w_.emplace_back(m.beta2 - m.beta3, n);
                   },
                   [&](const FractionalQuasiLinear& m) { strain_w_.emplace_back(m.alpha, n); },
               },
               model_);
}

void ViscoelasticStepper::check_index(const StressState& state) const {
    const std::size_t len = state.sigma.size();
    if (len == 0 || state.strain_ve.size() != len || state.strain.size() != len ||
        state.strain_vp.size() != len)
        throw IndexError("stress state histories have mismatched lengths");
    if (len > max_steps_) {
        std::ostringstream os;
        os << "stepper was built for " << max_steps_ << " steps; state already holds " << len - 1;
        throw IndexError(os.str());
    }
    if (std::holds_alternative<FractionalQuasiLinear>(model_) &&
        state.tangent_increment.size() + 1 != len)
        throw IndexError("quasi-linear tangent increments out of step with histories");
}

double ViscoelasticStepper::stress(const StressState& state, double eps_ve_next,
                                   ExponentMode mode) const {
    check_index(state);
    const std::size_t n = state.last();
    const auto& ve = state.strain_ve;
    const double d = eps_ve_next - ve[n];
    const auto& c = c_.c;

    return std::visit(
        Overloaded{
            [&](const ScottBlair&) { return c[0] * (d + history_term(ve, strain_w_[0], n)); },
            [&](const FractionalKelvinVoigt&) {
                return c[0] * (d + history_term(ve, strain_w_[0], n)) +
                       c[1] * (d + history_term(ve, strain_w_[1], n));
            },
            [&](const FractionalMaxwell&) {
                const double s = state.sigma[n] - history_term(state.sigma, stress_w_[0], n);
                return (c[0] * (d + history_term(ve, strain_w_[0], n)) + c[1] * s) / (1.0 + c[1]);
            },
            [&](const FractionalKelvinZener&) {
                const double s = state.sigma[n] - history_term(state.sigma, stress_w_[0], n);
                return (c[0] * (d + history_term(ve, strain_w_[0], n)) +
                        c[1] * (d + history_term(ve, strain_w_[1], n)) +
                        c[2] * (d + history_term(ve, strain_w_[2], n)) + c[3] * s) /
                       (1.0 + c[3]);
            },
            [&](const FractionalPoyntingThomson&) {
                const double s3 = state.sigma[n] - history_term(state.sigma, stress_w_[0], n);
                const double s4 = state.sigma[n] - history_term(state.sigma, stress_w_[1], n);
                return (c[0] * (d + history_term(ve, strain_w_[0], n)) +
                        c[1] * (d + history_term(ve, strain_w_[1], n)) + c[2] * s3 + c[3] * s4) /
                       (1.0 + c[2] + c[3]);
            },
            [&](const FractionalQuasiLinear& m) {
                const double e = mode == ExponentMode::Midpoint ? 0.5 * (ve[n] + eps_ve_next) : ve[n];
                return c[0] * (std::exp(m.B * e) * d +
                               increment_history_term(state.tangent_increment, strain_w_[0], n));
            },
        },
        model_);
}

double ViscoelasticStepper::projection_constant(const StressState& state) const {
    const auto& c = c_.c;
    return std::visit(
        Overloaded{
            [&](const ScottBlair&) { return c[0]; },
            [&](const FractionalKelvinVoigt&) { return c[0] + c[1]; },
            [&](const FractionalMaxwell&) { return c[0] / (1.0 + c[1]); },
            [&](const FractionalKelvinZener&) { return (c[0] + c[1] + c[2]) / (1.0 + c[3]); },
            [&](const FractionalPoyntingThomson&) { return (c[0] + c[1]) / (1.0 + c[2] + c[3]); },
            [&](const FractionalQuasiLinear& m) {
                return c[0] * std::exp(m.B * state.strain_ve.back());
            },
        },
        model_);
}

void ViscoelasticStepper::commit(StressState& state, double strain, double strain_vp,
                                 double sigma) const {
    const double ve_prev = state.strain_ve.back();
    const double ve = strain - strain_vp;
    state.strain.push_back(strain);
    state.strain_vp.push_back(strain_vp);
    state.strain_ve.push_back(ve);
    state.sigma.push_back(sigma);
    if (const auto* m = std::get_if<FractionalQuasiLinear>(&model_)) {
        state.tangent_increment.push_back(std::exp(m->B * 0.5 * (ve_prev + ve)) * (ve - ve_prev));
    }
}

double relaxation_modulus(const MaterialModel& model, double t) {
    if (!(t > 0.0)) throw DomainError("relaxation modulus requires t > 0");
    validate(model);
    return std::visit(
        Overloaded{
            [&](const ScottBlair& m) { return sb_modulus(m.E, m.beta, t); },
            [&](const FractionalKelvinVoigt& m) {
                return sb_modulus(m.E1, m.beta1, t) + sb_modulus(m.E2, m.beta2, t);
            },
            [&](const FractionalMaxwell& m) { return fm_modulus(m.E1, m.E2, m.beta1, m.beta2, t); },
            [&](const FractionalKelvinZener& m) {
                return fm_modulus(m.E1, m.E2, m.beta1, m.beta2, t) + sb_modulus(m.E3, m.beta3, t);
            },
            [](const FractionalPoyntingThomson&) -> double {
                throw UnsupportedOperation(
                    "FPT: no closed-form relaxation modulus is available");
            },
            [](const FractionalQuasiLinear&) -> double {
                throw UnsupportedOperation(
                    "FQLV: no closed-form relaxation modulus is available");
            },
        },
        model);
}

double fqlv_analytic_stress(const FractionalQuasiLinear& p, double t, double rate) {
    validate(MaterialModel{p});
    if (!(t >= 0.0)) throw DomainError("fqlv_analytic_stress requires t >= 0");
    if (!(rate > 0.0)) throw DomainError("fqlv_analytic_stress requires a positive strain rate");
    const double x = p.B * rate * t;
    return p.E * p.A * std::pow(p.B * rate, p.alpha) * std::exp(x) *
           regularized_lower_gamma(1.0 - p.alpha, x);
}

}  // namespace fvep
