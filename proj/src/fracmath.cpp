#include "fvep/fracmath.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <quadmath.h>

#include "fvep/errors.hpp"

namespace fvep {

FractionalOrder::FractionalOrder(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        std::ostringstream os;
        os << "fractional order must lie in (0,1), got " << beta;
        throw DomainError(os.str());
    }
}

HistorySeries::HistorySeries(double dt, std::size_t reserve) : dt_(dt) {
    if (!(dt > 0.0)) throw DomainError("history series requires dt > 0");
    values_.reserve(reserve);
}

HistorySeries::HistorySeries(double dt, std::vector<double> values)
    : dt_(dt), values_(std::move(values)) {
    if (!(dt > 0.0)) throw DomainError("history series requires dt > 0");
}

double HistorySeries::at(std::size_t i) const {
    if (i >= values_.size()) {
        std::ostringstream os;
        os << "history index " << i << " out of range (size " << values_.size() << ")";
        throw IndexError(os.str());
    }
    return values_[i];
}

L1Weights::L1Weights(double beta, std::size_t n)
    : L1Weights(FractionalOrder(beta).value(), n, Unchecked{}) {}

L1Weights L1Weights::composite(double beta, std::size_t n) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        std::ostringstream os;
        os << "composite order must lie in [0,1), got " << beta;
        throw DomainError(os.str());
    }
    return L1Weights(beta, n, Unchecked{});
}

L1Weights::L1Weights(double beta, std::size_t n, Unchecked) : beta_(beta), b_(n + 1) {
    const double p = 1.0 - beta;
    // b_0 = 1 exactly; 0^p = 0 for p > 0.
    double prev = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        const double next = std::pow(static_cast<double>(j + 1), p);
        b_[j] = next - prev;
        prev = next;
    }
}

double L1Weights::scale(double dt) const {
    return 1.0 / (std::pow(dt, beta_) * std::tgamma(2.0 - beta_));
}

namespace {

void require_weights(const L1Weights& w, std::size_t n) {
    if (n > w.max_index()) {
        std::ostringstream os;
        os << "L1 weights cover j <= " << w.max_index() << ", history needs " << n;
        throw IndexError(os.str());
    }
}

}  // namespace

double history_term(std::span<const double> u, const L1Weights& w, std::size_t n) {
    if (u.size() < n + 1) {
        std::ostringstream os;
        os << "history term at n=" << n << " needs " << n + 1 << " samples, have " << u.size();
        throw IndexError(os.str());
    }
    require_weights(w, n);
    const double* b = w.values().data();
    const double* v = u.data();
    // Four independent accumulators; the summation order is fixed.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t j = 1;
    for (; j + 3 <= n; j += 4) {
        a0 += b[j] * (v[n + 1 - j] - v[n - j]);
        a1 += b[j + 1] * (v[n - j] - v[n - j - 1]);
        a2 += b[j + 2] * (v[n - j - 1] - v[n - j - 2]);
        a3 += b[j + 3] * (v[n - j - 2] - v[n - j - 3]);
    }
    for (; j <= n; ++j) a0 += b[j] * (v[n + 1 - j] - v[n - j]);
    return (a0 + a1) + (a2 + a3);
}

double history_term(const HistorySeries& u, const L1Weights& w, std::size_t n) {
    return history_term(u.values(), w, n);
}

double increment_history_term(std::span<const double> d, const L1Weights& w,
                              std::size_t n) {
    if (n == 0) return 0.0;
    if (d.size() < n) {
        std::ostringstream os;
        os << "increment history at n=" << n << " needs " << n << " increments, have "
           << d.size();
        throw IndexError(os.str());
    }
    require_weights(w, n);
    const double* b = w.values().data();
    const double* v = d.data();
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t j = 1;
    for (; j + 3 <= n; j += 4) {
        a0 += b[j] * v[n - j];
        a1 += b[j + 1] * v[n - j - 1];
        a2 += b[j + 2] * v[n - j - 2];
        a3 += b[j + 3] * v[n - j - 3];
    }
    for (; j <= n; ++j) a0 += b[j] * v[n - j];
    return (a0 + a1) + (a2 + a3);
}

double caputo_l1(const HistorySeries& u, const L1Weights& w, std::size_t n1) {
    if (n1 == 0) throw IndexError("L1 Caputo quotient is undefined at index 0");
    if (u.size() < n1 + 1) throw IndexError("L1 Caputo quotient: series too short");
    const std::size_t n = n1 - 1;
    return w.scale(u.dt()) * (u[n1] - u[n] + history_term(u, w, n));
}

double caputo_l1(const HistorySeries& u, double beta, std::size_t n1) {
    return caputo_l1(u, L1Weights(beta, n1 == 0 ? 0 : n1 - 1), n1);
}

namespace {

using ld = long double;

constexpr ld kLdEps = LDBL_EPSILON;

// 1/Gamma(x), zero at the poles.
ld rgamma(ld x) {
    if (x <= 0.0L && x == std::floor(x)) return 0.0L;
    if (x > 1700.0L) return 0.0L;
    if (x < 0.5L) {
        // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
        const ld pi = std::numbers::pi_v<ld>;
        return std::sin(pi * x) * std::tgamma(1.0L - x) / pi;
    }
    return 1.0L / std::tgamma(x);
}

ld accuracy_scale(ld value) {
    // Relative tolerance, absolute once the value itself is below 1e-14.
    const ld mag = std::fabs(value);
    return mag < 1e-14L ? 1.0L : mag;
}

struct Evaluation {
    ld value = 0.0L;
    ld error = std::numeric_limits<ld>::infinity();
    std::size_t terms = 0;
};

Evaluation ml_series(ld a, ld b, ld z, ld rel_tol) {
    Evaluation out;
    if (z == 0.0L) {
        out.value = rgamma(b);
        out.error = 0.0L;
        out.terms = 1;
        return out;
    }
    constexpr std::size_t kMaxTerms = 200000;
    ld sum = 0.0L;
    ld max_term = 0.0L;
    ld prev_abs = std::numeric_limits<ld>::infinity();
    ld zk = 1.0L;
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        const ld arg = a * static_cast<ld>(k) + b;
        ld term;
        if (arg < 1700.0L) {
            term = zk * rgamma(arg);
        } else {
            // Only reached once terms have decayed below any tolerance.
            term = 0.0L;
        }
        sum += term;
        const ld at = std::fabs(term);
        max_term = std::max(max_term, at);
        out.terms = k + 1;
        // Alternating sums whose peak term dwarfs the result cannot be
        // rescued by more terms.
        if (z < 0.0L && max_term * 16.0L * kLdEps > rel_tol) break;
        const bool decaying = at <= prev_abs;
        if (decaying && k > 2 && at <= kLdEps * std::fabs(sum)) {
            out.value = sum;
            out.error = max_term * 16.0L * kLdEps + at;
            return out;
        }
        if (decaying && at == 0.0L && arg >= 1700.0L) {
            out.value = sum;
            out.error = max_term * 16.0L * kLdEps;
            return out;
        }
        prev_abs = at;
        zk *= z;
        if (!std::isfinite(zk)) break;
    }
    out.value = sum;
    out.error = std::numeric_limits<ld>::infinity();
    return out;
}

// E_{a,b}(z) ~ -sum_{k>=1} z^{-k} / Gamma(b - a k), z -> -inf, 0 < a < 1.
// 1/Gamma(b - a k) oscillates in sign and size through the sin factor of the
// reflection formula, so truncation follows its smooth bound
// Gamma(1 - b + a k) / pi instead of the terms themselves.
Evaluation ml_asymptotic(ld a, ld b, ld z) {
    Evaluation out;
    constexpr std::size_t kMaxTerms = 5000;
    const ld pi = std::numbers::pi_v<ld>;
    const ld log_abs_z = std::log(-z);
    auto log_bound = [&](std::size_t k) {
        const ld x = b - a * static_cast<ld>(k);
        if (x >= 0.5L) return -static_cast<ld>(k) * log_abs_z - std::lgamma(x);
        return -static_cast<ld>(k) * log_abs_z + std::lgamma(1.0L - x) - std::log(pi);
    };
    ld sum = 0.0L;
    ld prev_bound = std::numeric_limits<ld>::infinity();
    for (std::size_t k = 1; k <= kMaxTerms; ++k) {
        const ld bound = std::exp(log_bound(k));
        if (bound > prev_bound) {
            // Optimal truncation: the bounds have started to grow.
            out.value = sum;
            out.error = bound + 16.0L * kLdEps * std::fabs(sum);
            out.terms = k - 1;
            return out;
        }
        const ld term = -std::exp(-static_cast<ld>(k) * log_abs_z) * rgamma(b - a * static_cast<ld>(k)) *
                        (k % 2 == 0 ? 1.0L : -1.0L);
        sum += term;
        out.terms = k;
        if (bound <= kLdEps * std::fabs(sum)) {
            out.value = sum;
            out.error = bound + 16.0L * kLdEps * std::fabs(sum);
            return out;
        }
        prev_bound = bound;
    }
    out.value = sum;
    out.error = prev_bound;
    return out;
}

// Power series in binary128 for moderate negative arguments where the
// extended-precision sum cancels too much.
Evaluation ml_series_quad(double a, double b, double z) {
    using q = __float128;
    Evaluation out;
    constexpr std::size_t kMaxTerms = 20000;
    const q qa = a, qb = b, qz = z;
    q sum = 0, zk = 1, max_term = 0;
    q prev_abs = HUGE_VALQ;
    const q eps = ldexpq(1, -112);
    const q pi = acosq(-1);
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        const q arg = qa * static_cast<q>(static_cast<double>(k)) + qb;
        if (arg > 1700) break;
        q rg;
        if (arg <= 0 && floorq(arg) == arg)
            rg = 0;
        else if (arg < 0.5)
            rg = sinq(pi * arg) * tgammaq(1 - arg) / pi;
        else
            rg = 1 / tgammaq(arg);
        const q term = zk * rg;
        sum += term;
        const q at = fabsq(term);
        if (at > max_term) max_term = at;
        out.terms = k + 1;
        if (at <= prev_abs && k > 2 && at <= eps * fabsq(sum)) {
            out.value = static_cast<ld>(sum);
            out.error = static_cast<ld>(max_term * 16 * eps + at);
            return out;
        }
        prev_abs = at;
        zk *= qz;
        if (isinfq(zk)) break;
    }
    out.value = static_cast<ld>(sum);
    out.error = std::numeric_limits<ld>::infinity();
    return out;
}

}  // namespace

double mittag_leffler(double a, double b, double z, double rel_tol) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        std::ostringstream os;
        os << "Mittag-Leffler requires a > 0, got a=" << a;
        throw DomainError(os.str());
    }
    if (!std::isfinite(b) || !std::isfinite(z)) throw DomainError("Mittag-Leffler: non-finite argument");

    const ld tol = rel_tol;
    Evaluation asym;
    if (z < 0.0 && a < 1.0) {
        asym = ml_asymptotic(a, b, z);
        if (asym.error <= tol * accuracy_scale(asym.value)) return static_cast<double>(asym.value);
    }
    Evaluation series = ml_series(a, b, z, tol);
    if (series.error <= tol * accuracy_scale(series.value)) return static_cast<double>(series.value);
    if (z < 0.0) {
        series = ml_series_quad(a, b, z);
        if (series.error <= tol * accuracy_scale(series.value)) return static_cast<double>(series.value);
    }

    std::ostringstream os;
    os.precision(3);
    os << "Mittag-Leffler E_{" << a << "," << b << "}(" << z << ") did not reach tolerance "
       << rel_tol << ": series error estimate " << static_cast<double>(series.error)
       << " after " << series.terms << " terms";
    if (z < 0.0 && a < 1.0)
        os << ", asymptotic error estimate " << static_cast<double>(asym.error);
    throw AccuracyError(os.str());
}

double upper_incomplete_gamma(double s, double x) {
    if (!(s > 0.0) || !std::isfinite(s) || !(x >= 0.0) || std::isnan(x)) {
        std::ostringstream os;
        os << "upper incomplete gamma requires s > 0 and x >= 0, got s=" << s << " x=" << x;
        throw DomainError(os.str());
    }
    if (x == 0.0) return std::tgamma(s);
    if (std::isinf(x)) return 0.0;

    constexpr int kMaxIter = 10000;
    const ld ls = s;
    const ld lx = x;
    const ld prefactor = std::exp(-lx + ls * std::log(lx));

    if (x < s + 1.0) {
        // Lower gamma by its power series, then the complement.
        ld ap = ls;
        ld del = 1.0L / ls;
        ld sum = del;
        for (int i = 0; i < kMaxIter; ++i) {
            ap += 1.0L;
            del *= lx / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kLdEps) {
                return static_cast<double>(std::tgamma(ls) - sum * prefactor);
            }
        }
        throw AccuracyError("upper incomplete gamma: series did not converge");
    }

    // Continued fraction, modified Lentz.
    constexpr ld tiny = 1e-4000L;
    ld bcf = lx + 1.0L - ls;
    ld c = 1.0L / tiny;
    ld d = 1.0L / bcf;
    ld h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const ld an = -static_cast<ld>(i) * (static_cast<ld>(i) - ls);
        bcf += 2.0L;
        d = an * d + bcf;
        if (std::fabs(d) < tiny) d = tiny;
        c = bcf + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const ld del = d * c;
        h *= del;
        if (std::fabs(del - 1.0L) < kLdEps) return static_cast<double>(prefactor * h);
    }
    throw AccuracyError("upper incomplete gamma: continued fraction did not converge");
}

double regularized_lower_gamma(double s, double x) {
    if (!(s > 0.0) || !std::isfinite(s) || !(x >= 0.0) || std::isnan(x)) {
        std::ostringstream os;
        os << "regularized lower gamma requires s > 0 and x >= 0, got s=" << s << " x=" << x;
        throw DomainError(os.str());
    }
    if (x == 0.0) return 0.0;
    if (x >= s + 1.0) return 1.0 - upper_incomplete_gamma(s, x) / std::tgamma(s);
    const ld ls = s;
    const ld lx = x;
    ld ap = ls;
    ld del = 1.0L / ls;
    ld sum = del;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0L;
        del *= lx / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kLdEps) {
            return static_cast<double>(sum * std::exp(-lx + ls * std::log(lx) - std::lgamma(ls)));
        }
    }
    throw AccuracyError("regularized lower gamma: series did not converge");
}

}  // namespace fvep
