#ifndef LFCM_STATS_HPP
#define LFCM_STATS_HPP

#include "lfcm/linalg.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace lfcm {

// t_{ij,uv} = Sigma_iu Sigma_jv - Sigma_iv Sigma_ju over four distinct indices.
struct TetradIndex {
    Index i, j, u, v;
    friend bool operator==(const TetradIndex&, const TetradIndex&) = default;
};

// Partial correlation of (j, k) given the conditioning set of the owning test.
struct CorrelationIndex {
    Index j, k;
    friend bool operator==(const CorrelationIndex&, const CorrelationIndex&) = default;
};

using StatisticId = std::variant<TetradIndex, CorrelationIndex>;

// Outcome of one simultaneous test: marginal p-values, their Sidak
// adjustment, and the decision. reject holds iff min(adjusted_p) < alpha.
struct TestReport {
    std::vector<StatisticId> statistic_ids;
    std::vector<double> raw_p;
    std::vector<double> adjusted_p;
    double alpha = 0.05;
    bool reject = false;
    // Tetrads whose plug-in variance was non-positive; their p-value is 1.
    std::size_t degenerate = 0;

    double min_adjusted_p() const;
    friend bool operator==(const TestReport&, const TestReport&) = default;
};

// Raw p-values of a Wishart vanishing-tetrad test, in enumeration order.
struct WishartPValues {
    std::vector<TetradIndex> tetrads;
    std::vector<double> raw_p;
    std::size_t degenerate = 0;
};

double tetrad(const CovarianceSource& cov, const TetradIndex& t);

// Plug-in variance of the sample tetrad at sample size n:
//   n (n-1)^-3 ((n+2)|S_ij,ij||S_uv,uv| - n|S_ijuv| + 3n |S_ij,uv|^2)
// Throws DegenerateVariance when the result is not positive.
double tetrad_variance(const CovarianceSource& cov, std::int64_t n, const TetradIndex& t);

// Every tetrad {i<j} from A against {u<v} from B with four distinct indices,
// lexicographic in (i, j, u, v). When A and B overlap, t_{ij,uv} and
// t_{uv,ij} are the same statistic and only the (i,j) <= (u,v) copy is kept.
std::vector<TetradIndex> enumerate_tetrads(std::span<const Index> a, std::span<const Index> b);

WishartPValues wishart_pvalues(const CovarianceSource& cov, std::span<const Index> a, std::span<const Index> b);

// 1 - (1 - p)^M elementwise, M = raw_p.size().
std::vector<double> sidak_adjust(std::span<const double> raw_p);

// H_vt(A, B): all tetrads of Sigma_{A,B} vanish.
TestReport test_vanishing_tetrads(const CovarianceSource& cov, std::span<const Index> a, std::span<const Index> b,
                                  double alpha);

// Two-tailed p-value of sqrt(n - cond_size - 3) * atanh(rho).
double fisher_pvalue(double rho, std::int64_t n, std::size_t cond_size);

// H_ci(X_j, X_A | X_B).
TestReport test_conditional_independence(const CovarianceSource& cov, Index j, std::span<const Index> a,
                                         std::span<const Index> b, double alpha);

}  // namespace lfcm

#endif  // LFCM_STATS_HPP
