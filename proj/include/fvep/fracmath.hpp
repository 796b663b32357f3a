#pragma once

// Special functions and the L1 discretization of the Caputo derivative.

#include <cstddef>
#include <span>
#include <vector>

namespace fvep {

/// Fractional order strictly inside (0, 1).
class FractionalOrder {
public:
    explicit FractionalOrder(double beta);
    double value() const noexcept { return beta_; }
    operator double() const noexcept { return beta_; }

private:
    double beta_;
};

/// Uniformly sampled series u_n = u(n dt), index 0 at t = 0. Append-only.
class HistorySeries {
public:
    HistorySeries() = default;
    explicit HistorySeries(double dt, std::size_t reserve = 0);
    HistorySeries(double dt, std::vector<double> values);

    void push_back(double v) { values_.push_back(v); }
    void reserve(std::size_t n) { values_.reserve(n); }

    double operator[](std::size_t i) const { return values_[i]; }
    double at(std::size_t i) const;
    double back() const { return values_.back(); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double dt() const noexcept { return dt_; }

    std::span<const double> values() const noexcept { return values_; }

private:
    double dt_ = 1.0;
    std::vector<double> values_;
};

/// L1 weights b_j = (j+1)^(1-beta) - j^(1-beta) for j = 0..n.
class L1Weights {
public:
    /// Native orders: throws DomainError unless 0 < beta < 1.
    L1Weights(double beta, std::size_t n);

    /// Composite orders such as beta2 - beta1 may degenerate to zero
    /// (then every weight is 1). Accepts 0 <= beta < 1.
    static L1Weights composite(double beta, std::size_t n);

    double beta() const noexcept { return beta_; }
    std::size_t max_index() const noexcept { return b_.size() - 1; }
    double operator[](std::size_t j) const { return b_[j]; }
    std::span<const double> values() const noexcept { return b_; }

    /// 1 / (dt^beta Gamma(2 - beta)), the prefactor of the L1 quotient.
    double scale(double dt) const;

private:
    struct Unchecked {};
    L1Weights(double beta, std::size_t n, Unchecked);

    double beta_;
    std::vector<double> b_;
};

/// sum_{j=1}^{n} b_j (u_{n+1-j} - u_{n-j}); reads u_0..u_n only.
double history_term(std::span<const double> u, const L1Weights& w, std::size_t n);
double history_term(const HistorySeries& u, const L1Weights& w, std::size_t n);

/// sum_{j=1}^{n} b_j d_{n-j} for a series of interval increments d_k
/// (d_k belongs to [t_k, t_{k+1}]). With d_k = u_{k+1} - u_k this equals
/// history_term(u).
double increment_history_term(std::span<const double> d, const L1Weights& w,
                              std::size_t n);

/// L1 approximation of the Caputo derivative of order w.beta() at t_{n1}.
double caputo_l1(const HistorySeries& u, const L1Weights& w, std::size_t n1);
double caputo_l1(const HistorySeries& u, double beta, std::size_t n1);

/// Two-parameter Mittag-Leffler function E_{a,b}(z) for real z, a > 0.
///
/// Uses the power series with extended-precision accumulation while its
/// cancellation error stays within tolerance, and the inverse-power
/// asymptotic expansion for large negative z when 0 < a < 1. Throws
/// AccuracyError when neither route reaches `rel_tol`.
double mittag_leffler(double a, double b, double z, double rel_tol = 1e-12);

/// Upper incomplete gamma Gamma(s, x) for s > 0, x >= 0.
double upper_incomplete_gamma(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = 1 - Gamma(s, x)/Gamma(s),
/// evaluated without cancellation for small x.
double regularized_lower_gamma(double s, double x);

}  // namespace fvep
