#pragma once

// Reference computations used only by the tests. None of them call into the
// code paths they check.

#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Every vector in {0..k_prime-1}^k that is non-decreasing, starts at 0 and
/// never skips a cluster id. Exhaustive over k_prime^k candidates.
inline std::set<std::vector<int>> monotone_prefix_assignments(int k, int k_prime) {
    std::set<std::vector<int>> out;
    std::vector<int> a(static_cast<std::size_t>(k), 0);
    long total = 1;
    for (int i = 0; i < k; ++i) total *= k_prime;
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < k; ++i) {
            a[static_cast<std::size_t>(i)] = static_cast<int>(c % k_prime);
            c /= k_prime;
        }
        bool ok = a[0] == 0;
        for (int i = 1; ok && i < k; ++i) {
            const int d = a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i - 1)];
            ok = d == 0 || d == 1;
        }
        if (ok) out.insert(a);
    }
    return out;
}

/// Log-odds for a single binary dummy: beta0 = logit(P(y|d=0)), beta1 = log odds ratio.
struct LogOdds {
    double intercept;
    double slope;
};
inline LogOdds two_by_two(double pos1, double neg1, double pos0, double neg0) {
    return {std::log(pos0 / neg0), std::log((pos1 / neg1) / (pos0 / neg0))};
}

/// Central finite-difference gradient.
inline Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& at, double h = 1e-5) {
    Eigen::VectorXd g(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
        Eigen::VectorXd up = at, down = at;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2 * h);
    }
    return g;
}

/// Direct Bernoulli / Poisson log-likelihood, written independently.
inline double bernoulli_loglik(const Eigen::MatrixXd& x, const std::vector<double>& y, const Eigen::VectorXd& b) {
    double ll = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double eta = x.row(i).dot(b);
        const double p = 1.0 / (1.0 + std::exp(-eta));
        ll += y[static_cast<std::size_t>(i)] * std::log(p) + (1 - y[static_cast<std::size_t>(i)]) * std::log(1 - p);
    }
    return ll;
}

inline double poisson_loglik(const Eigen::MatrixXd& x, const std::vector<double>& y, const Eigen::VectorXd& b) {
    double ll = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double eta = x.row(i).dot(b);
        ll += y[static_cast<std::size_t>(i)] * eta - std::exp(eta) - std::lgamma(y[static_cast<std::size_t>(i)] + 1);
    }
    return ll;
}

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace oracle
