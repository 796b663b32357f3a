#pragma once

// Reference computations used by the tests. None of them calls into fvep.

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

/// Adaptive Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 50) {
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } rec{f};
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec.run(a, b, fa, fm, fb, whole, tol, depth);
}

/// Gamma(s, x) by quadrature of t^(s-1) e^-t over [x, x + 60].
inline double upper_gamma(double s, double x) {
    auto f = [s](double t) { return std::pow(t, s - 1.0) * std::exp(-t); };
    double total = 0.0;
    for (double a = x; a < x + 60.0; a += 1.0) total += simpson(f, a, a + 1.0, 1e-17);
    return total;
}

/// Truncated Mittag-Leffler series; only for moderate |z|.
inline double ml_series(double a, double b, double z) {
    long double sum = 0.0L, zk = 1.0L;
    for (int k = 0; k < 400; ++k) {
        const long double term = zk / std::tgamma(static_cast<long double>(a) * k + b);
        sum += term;
        if (k > 5 && std::abs(term) < 1e-22L * std::abs(sum)) break;
        zk *= z;
    }
    return static_cast<double>(sum);
}

/// L1 quotient written out directly from the weight formula.
inline double l1_direct(const std::function<double(double)>& u, double beta, double dt, int n1) {
    double acc = 0.0;
    for (int j = 0; j < n1; ++j) {
        const double b = std::pow(j + 1.0, 1.0 - beta) - std::pow(static_cast<double>(j), 1.0 - beta);
        acc += b * (u((n1 - j) * dt) - u((n1 - j - 1) * dt));
    }
    return acc / (std::pow(dt, beta) * std::tgamma(2.0 - beta));
}

inline double rel(double a, double b) {
    const double s = std::abs(b) < 1e-14 ? 1.0 : std::abs(b);
    return std::abs(a - b) / s;
}

}  // namespace oracle
