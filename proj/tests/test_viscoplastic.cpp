#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "fvep/errors.hpp"
#include "fvep/viscoplastic.hpp"
#include "oracles.hpp"

using namespace fvep;

namespace {

double triangle(double t, double amp, double omega) {
    return 2.0 * amp / std::numbers::pi * std::asin(std::sin(2.0 * std::numbers::pi * omega * t));
}

struct Run {
    StressState s;
    PlasticState p;
    std::vector<StepOutcome> out;       // out[k] is the step k -> k+1
    std::vector<double> residual;       // yield function after correction
};

template <class Mapper>
Run drive(const Mapper& m, double dt, int N, const std::function<double(double)>& strain) {
    Run r{StressState::at_rest(dt, N + 1), PlasticState::at_rest(dt, N + 1), {}, {}};
    for (int n = 0; n < N; ++n) {
        const double e = strain((n + 1) * dt);
        const StepOutcome o = m.return_map(r.s, r.p, e);
        if constexpr (std::is_same_v<Mapper, ReturnMapper>)
            r.residual.push_back(o.plastic ? m.yield_function(r.p, o.sigma, o.alpha) : 0.0);
        m.commit(r.s, r.p, e, o);
        r.out.push_back(o);
    }
    return r;
}

const std::vector<MaterialModel> kModels = {
    ScottBlair{50, 0.3},
    FractionalKelvinVoigt{50, 50, 0.3, 0.7},
    FractionalMaxwell{50, 50, 0.3, 0.7},
    FractionalKelvinZener{50, 50, 50, 0.3, 0.7, 0.1},
    FractionalPoyntingThomson{50, 50, 50, 0.3, 0.7, 0.1},
    FractionalQuasiLinear{50, 0.3, 1.0, 1.0},
};

}  // namespace

TEST_CASE("hardening constant") {
    CHECK(oracle::rel(k_star({0, 5.0, 0.5, 0}, 1.0), 5.0 / std::tgamma(1.5)) < 1e-15);
    CHECK(k_star({0, 5.0, 0.5, 0}, 1.0) == doctest::Approx(5.6419).epsilon(1e-4));
    CHECK(k_star({0, 0.0, 0.5, 0}, 0.1) == 0.0);
    CHECK(oracle::rel(k_star({0, 5.0, 0.5, 0}, 0.05) / k_star({0, 5.0, 0.5, 0}, 0.1), std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(ViscoplasticParams{-1, 5, 0.5, 0}), DomainError);
    CHECK_THROWS_AS(validate(ViscoplasticParams{1, -5, 0.5, 0}), DomainError);
    CHECK_THROWS_AS(validate(ViscoplasticParams{1, 5, 1.0, 0}), DomainError);
    CHECK_THROWS_AS(validate(ViscoplasticParams{1, 5, 0.5, -1}), DomainError);
    CHECK_NOTHROW(validate(ViscoplasticParams::never_yielding()));
}

TEST_CASE("trial state below yield and with empty hardening history") {
    const double dt = 0.01;
    const ReturnMapper m(ScottBlair{50, 0.3}, {10.0, 5.0, 0.7, 2.0}, dt, 10);
    StressState s = StressState::at_rest(dt);
    PlasticState p = PlasticState::at_rest(dt);
    const TrialState t = m.trial_state(s, p, 1e-4);
    CHECK(t.f < 0.0);
    CHECK(t.f == doctest::Approx(std::abs(t.sigma) - 10.0).epsilon(1e-15));
    const StepOutcome o = m.advance(s, p, 1e-4);
    CHECK_FALSE(o.plastic);
    CHECK(o.dgamma == 0.0);
    CHECK(o.sigma == t.sigma);
}

TEST_CASE("plastic onset step matches a scripted elastic step-through") {
    const double dt = 1.0 / 200, E = 50, beta = 0.3, sy = 10.0;
    auto strain = [](double t) { return 0.8 * t; };
    int expected = -1;
    for (int n = 1; n <= 200 && expected < 0; ++n)
        if (E * oracle::l1_direct(strain, beta, dt, n) > sy) expected = n;
    REQUIRE(expected > 1);
    const Run r = drive(ReturnMapper(ScottBlair{E, beta}, {sy, 5.0, 0.7, 0.0}, dt, 200), dt, 200, strain);
    int onset = -1;
    for (int k = 0; k < 200 && onset < 0; ++k)
        if (r.out[k].plastic) onset = k + 1;
    CHECK(onset == expected);
}

TEST_CASE("perfect plasticity returns to the yield stress") {
    const double dt = 0.01;
    const Run r = drive(ReturnMapper(ScottBlair{50, 0.4}, {3.0, 0.0, 0.5, 0.0}, dt, 60), dt, 60,
                        [](double t) { return t; });
    int first = -1;
    for (int k = 0; k < 60 && first < 0; ++k)
        if (r.out[k].plastic) first = k;
    REQUIRE(first >= 0);
    CHECK(std::abs(std::abs(r.out[first].sigma) - 3.0) <= 1e-12 * 3.0);
}

TEST_CASE("trial exactly on the yield surface stays elastic") {
    const double dt = 0.01;
    const MaterialModel sb = ScottBlair{50, 0.3};
    const ReturnMapper probe(sb, ViscoplasticParams::never_yielding(), dt, 4);
    StressState s0 = StressState::at_rest(dt);
    PlasticState p0 = PlasticState::at_rest(dt);
    const double sig = probe.trial_state(s0, p0, 0.01).sigma;
    const ReturnMapper m(sb, {std::abs(sig), 5.0, 0.5, 0.0}, dt, 4);
    const StepOutcome o = m.return_map(s0, p0, 0.01);
    CHECK(o.f_trial == 0.0);
    CHECK_FALSE(o.plastic);
    CHECK(o.dgamma == 0.0);
    CHECK(o.sigma == sig);
}

TEST_CASE("cyclic properties for every model") {
    const double dt = 1.0 / 1024;
    const int N = 1024;
    for (const auto& model : kModels) {
        CAPTURE(model_name(model));
        const ViscoplasticParams vp{1.0, 5.0, 0.7, 0.5};
        const ReturnMapper m(model, vp, dt, N);
        const Run r = drive(m, dt, N, [](double t) { return triangle(t, 0.25, 3.0); });
        int plastic = 0;
        bool ok_resid = true, ok_sign = true, ok_dg = true, ok_alpha = true, ok_vp = true, ok_kin = true;
        for (int k = 0; k < N; ++k) {
            const StepOutcome& o = r.out[k];
            CHECK((o.plastic == (o.f_trial > 0.0)));
            if (o.plastic) {
                ++plastic;
                ok_resid = ok_resid && std::abs(r.residual[k]) <= 1e-10 * std::max(1.0, vp.sigmaY);
                ok_sign = ok_sign && (o.sigma > 0) == (o.sigma_trial > 0) && o.sigma != 0.0;
            } else {
                ok_vp = ok_vp && r.s.strain_vp[k + 1] == r.s.strain_vp[k];
            }
            ok_dg = ok_dg && r.p.dgamma[k + 1] >= 0.0;
            ok_alpha = ok_alpha && r.p.alpha[k + 1] >= r.p.alpha[k] &&
                       r.p.alpha[k + 1] == r.p.alpha[k] + r.p.dgamma[k + 1];
            const double e = r.s.strain[k + 1];
            ok_kin = ok_kin && std::abs(e - r.s.strain_ve[k + 1] - r.s.strain_vp[k + 1]) <=
                                   1e-14 * std::max(1.0, std::abs(e));
        }
        CHECK(plastic > 10);
        CHECK(ok_resid);
        CHECK(ok_sign);
        CHECK(ok_dg);
        CHECK(ok_alpha);
        CHECK(ok_vp);
        CHECK(ok_kin);
    }
}

TEST_CASE("infinite yield stress reproduces the viscoelastic update bit for bit") {
    const double dt = 1.0 / 256;
    const int N = 256;
    auto strain = [](double t) { return triangle(t, 0.25, 2.0) + 0.1 * t; };
    for (const auto& model : kModels) {
        CAPTURE(model_name(model));
        const Run r = drive(ReturnMapper(model, ViscoplasticParams::never_yielding(), dt, N), dt, N, strain);
        const ViscoelasticStepper st(model, dt, N);
        // The quasi-linear trial freezes the newest exponent.
        const ExponentMode mode = std::holds_alternative<FractionalQuasiLinear>(model)
                                      ? ExponentMode::Explicit
                                      : ExponentMode::Midpoint;
        StressState s = StressState::at_rest(dt);
        bool same = true;
        for (int n = 0; n < N; ++n) {
            const double e = strain((n + 1) * dt);
            st.commit(s, e, 0.0, st.stress(s, e, mode));
            same = same && s.sigma[n + 1] == r.s.sigma[n + 1] && !r.out[n].plastic;
        }
        CHECK(same);
    }
}

TEST_CASE("near-spring SB with linear hardening matches classical plasticity") {
    // beta -> 0 turns the SB element into a spring and drops its memory.
    const double E = 200.0, Hh = 20.0, sy = 2.0, dt = 0.01;
    const int N = 400;
    auto strain = [](double t) { return 0.05 * std::sin(2.0 * std::numbers::pi * t) + 0.01 * t; };
    const Run r = drive(ReturnMapper(ScottBlair{E, 1e-10}, {sy, 0.0, 0.5, Hh}, dt, N), dt, N, strain);

    double ep = 0.0, a = 0.0;
    double worst = 0.0;
    std::vector<double> sig(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        const double e = strain(n * dt);
        double s = E * (e - ep);
        const double f = std::abs(s) - (sy + Hh * a);
        if (f > 0.0) {
            const double dg = f / (E + Hh);
            const double sgn = s > 0 ? 1.0 : -1.0;
            s -= sgn * E * dg;
            ep += sgn * dg;
            a += dg;
        }
        sig[n] = s;
        worst = std::max(worst, std::abs(s - r.s.sigma[n]));
    }
    CHECK(worst < 1e-6 * sy);

    // Elastic slope E, then plastic tangent E H / (E + H) on the first loading branch.
    const double d_el = (r.s.sigma[1] - r.s.sigma[0]) / (strain(dt) - strain(0));
    CHECK(oracle::rel(d_el, E) < 1e-6);
    int k = 2;
    while (!r.out[k - 1].plastic) ++k;
    const double d_pl = (r.s.sigma[k + 2] - r.s.sigma[k + 1]) / (strain((k + 2) * dt) - strain((k + 1) * dt));
    CHECK(oracle::rel(d_pl, E * Hh / (E + Hh)) < 1e-6);
}

TEST_CASE("legacy return map") {
    CHECK_THROWS_AS(LegacyReturnMapper(FractionalKelvinVoigt{}, {1, 1, 0.5, 0}, 0.1, 4), UnsupportedOperation);

    const double dt = 1.0 / 512;
    const int N = 512;
    auto cubic = [](double t) { return t * t * t; };
    for (double beta : {0.1, 0.5, 0.9}) {
        const ScottBlair sb{50, beta};
        const ViscoplasticParams vp{0.0, 5.0, beta, 0.0};
        const Run a = drive(ReturnMapper(sb, vp, dt, N), dt, N, cubic);
        const Run b = drive(LegacyReturnMapper(sb, vp, dt, N), dt, N, cubic);
        double peak = 0.0, dev = 0.0;
        for (int n = 0; n <= N; ++n) {
            peak = std::max(peak, std::abs(a.s.sigma[n]));
            dev = std::max(dev, std::abs(a.s.sigma[n] - b.s.sigma[n]));
        }
        CHECK_MESSAGE(dev <= 1e-12 * peak, "beta=" << beta << " dev=" << dev);
    }
}

TEST_CASE("legacy and new agree on the first plastic step") {
    const double dt = 1.0 / 400;
    const int N = 400;
    auto strain = [](double t) { return triangle(t, 0.25, 1.0); };
    const ScottBlair sb{50, 0.3};
    const ViscoplasticParams vp{10.0, 5.0, 0.7, 1.0};
    const Run a = drive(ReturnMapper(sb, vp, dt, N), dt, N, strain);
    const Run b = drive(LegacyReturnMapper(sb, vp, dt, N), dt, N, strain);
    int k = 0;
    while (!a.out[k].plastic) ++k;
    REQUIRE(b.out[k].plastic);
    CHECK(oracle::rel(a.out[k].sigma, b.out[k].sigma) < 1e-14);
    CHECK(oracle::rel(a.out[k].dgamma, b.out[k].dgamma) < 1e-13);
}

TEST_CASE("onset difference estimate") {
    const double dt = 1.0 / 1024;
    const int N = 1024;
    auto strain = [](double t) { return triangle(t, 0.25, 1.0); };
    const ScottBlair sb{50, 0.3};

    SUBCASE("different orders") {
        const ViscoplasticParams vp{10.0, 5.0, 0.7, 0.0};
        const Run a = drive(ReturnMapper(sb, vp, dt, N), dt, N, strain);
        const Run b = drive(LegacyReturnMapper(sb, vp, dt, N), dt, N, strain);
        const OnsetDifference d = onset_difference(sb, vp, dt, a.s.sigma, a.p.dgamma, b.s.sigma, b.p.dgamma);
        CHECK(d.onset > 0);
        CHECK(std::abs(d.estimate) > 0.0);
        CHECK(std::abs(d.measured - std::abs(d.estimate)) <= 1e-10);
        CHECK(onset_difference_estimate(sb, vp, dt, b.p.dgamma, d.onset - 1) == 0.0);
    }
    SUBCASE("equal orders without linear hardening") {
        const ViscoplasticParams vp{10.0, 5.0, 0.3, 0.0};
        const Run a = drive(ReturnMapper(sb, vp, dt, N), dt, N, strain);
        const Run b = drive(LegacyReturnMapper(sb, vp, dt, N), dt, N, strain);
        const OnsetDifference d = onset_difference(sb, vp, dt, a.s.sigma, a.p.dgamma, b.s.sigma, b.p.dgamma);
        CHECK(d.estimate == 0.0);
        CHECK(d.measured <= 1e-12);
    }
    SUBCASE("mismatched onsets are reported") {
        HistorySeries s(dt, std::vector<double>(6, 0.0));
        HistorySeries g1(dt, {0, 0, 1e-3, 0, 0, 0});
        HistorySeries g2(dt, {0, 0, 0, 1e-3, 0, 0});
        CHECK_THROWS_AS(onset_difference(sb, {1, 1, 0.5, 0}, dt, s, g1, s, g2), InvariantViolation);
    }
}
