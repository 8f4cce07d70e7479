#include "lfcm/stats.hpp"

#include "lfcm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace lfcm {

namespace {

void check_tetrad(const CovarianceSource& cov, const TetradIndex& t) {
    const std::array<Index, 4> idx{t.i, t.j, t.u, t.v};
    for (Index k : idx)
        if (k >= cov.dim()) throw IndexError("tetrad index " + std::to_string(k) + " out of range");
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b)
            if (idx[a] == idx[b]) throw InvalidTetrad("tetrad indices must be pairwise distinct");
}

double tetrad_unchecked(const CovarianceSource& cov, const TetradIndex& t) {
    return cov(t.i, t.u) * cov(t.j, t.v) - cov(t.i, t.v) * cov(t.j, t.u);
}

std::optional<double> variance_unchecked(const CovarianceSource& cov, double n, const TetradIndex& t) {
    const double det_ij = det2(cov(t.i, t.i), cov(t.i, t.j), cov(t.j, t.i), cov(t.j, t.j));
    const double det_uv = det2(cov(t.u, t.u), cov(t.u, t.v), cov(t.v, t.u), cov(t.v, t.v));
    const std::array<Index, 4> idx{t.i, t.j, t.u, t.v};
    std::array<std::array<double, 4>, 4> m{};
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) m[a][b] = cov(idx[a], idx[b]);
    const double det_all = det4(m);
    const double cross = tetrad_unchecked(cov, t);
    const double value = n / ((n - 1.0) * (n - 1.0) * (n - 1.0))
                         * ((n + 2.0) * det_ij * det_uv - n * det_all + 3.0 * n * cross * cross);
    if (!(value > 0.0) || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::int64_t finite_sample_size(const CovarianceSource& cov, std::int64_t minimum) {
    if (cov.is_population()) throw InsufficientSamples("hypothesis tests need a finite sample size");
    const std::int64_t n = *cov.n_eff();
    if (n < minimum)
        throw InsufficientSamples("sample size " + std::to_string(n) + " below the required " + std::to_string(minimum));
    return n;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidData("significance level must lie in (0, 1]");
}

TestReport finish_report(std::vector<StatisticId> ids, std::vector<double> raw, double alpha) {
    TestReport report;
    report.statistic_ids = std::move(ids);
    report.adjusted_p = sidak_adjust(raw);
    report.raw_p = std::move(raw);
    report.alpha = alpha;
    report.reject = report.min_adjusted_p() < alpha;
    return report;
}

}  // namespace

double TestReport::min_adjusted_p() const {
    if (adjusted_p.empty()) return 1.0;
    return *std::min_element(adjusted_p.begin(), adjusted_p.end());
}

double tetrad(const CovarianceSource& cov, const TetradIndex& t) {
    check_tetrad(cov, t);
    return tetrad_unchecked(cov, t);
}

double tetrad_variance(const CovarianceSource& cov, std::int64_t n, const TetradIndex& t) {
    check_tetrad(cov, t);
    if (n < 4) throw InsufficientSamples("tetrad variance needs n >= 4");
    auto v = variance_unchecked(cov, static_cast<double>(n), t);
    if (!v) throw DegenerateVariance("non-positive plug-in tetrad variance");
    return *v;
}

std::vector<TetradIndex> enumerate_tetrads(std::span<const Index> a, std::span<const Index> b) {
    std::vector<Index> sa(a.begin(), a.end());
    std::vector<Index> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
    std::sort(sb.begin(), sb.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    const std::set<Index> in_a(sa.begin(), sa.end());
    const std::set<Index> in_b(sb.begin(), sb.end());

    std::vector<TetradIndex> out;
    for (std::size_t x = 0; x < sa.size(); ++x) {
        for (std::size_t y = x + 1; y < sa.size(); ++y) {
            const Index i = sa[x], j = sa[y];
            for (std::size_t s = 0; s < sb.size(); ++s) {
                const Index u = sb[s];
                if (u == i || u == j) continue;
                for (std::size_t r = s + 1; r < sb.size(); ++r) {
                    const Index v = sb[r];
                    if (v == i || v == j) continue;
                    const bool mirrored = in_b.count(i) && in_b.count(j) && in_a.count(u) && in_a.count(v);
                    if (mirrored && std::pair(u, v) < std::pair(i, j)) continue;
                    out.push_back({i, j, u, v});
                }
            }
        }
    }
    return out;
}

WishartPValues wishart_pvalues(const CovarianceSource& cov, std::span<const Index> a, std::span<const Index> b) {
    const double n = static_cast<double>(finite_sample_size(cov, 4));
    for (Index k : a)
        if (k >= cov.dim()) throw IndexError("index out of range in tetrad test");
    for (Index k : b)
        if (k >= cov.dim()) throw IndexError("index out of range in tetrad test");

    WishartPValues out;
    out.tetrads = enumerate_tetrads(a, b);
    if (out.tetrads.empty()) throw EmptyHypothesis("no tetrad with four distinct indices between the two sets");
    out.raw_p.reserve(out.tetrads.size());
    for (const auto& t : out.tetrads) {
        const auto var = variance_unchecked(cov, n, t);
        if (!var) {
            ++out.degenerate;
            out.raw_p.push_back(1.0);
            continue;
        }
        out.raw_p.push_back(std_normal_two_tailed_p(tetrad_unchecked(cov, t) / std::sqrt(*var)));
    }
    return out;
}

std::vector<double> sidak_adjust(std::span<const double> raw_p) {
    const double m = static_cast<double>(raw_p.size());
    std::vector<double> out;
    out.reserve(raw_p.size());
    for (double p : raw_p) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidData("p-values must lie in [0, 1]");
        // 1 - (1 - p)^M without cancellation for small p.
        const double adj = -std::expm1(m * std::log1p(-p));
        out.push_back(std::clamp(std::max(adj, p), 0.0, 1.0));
    }
    return out;
}

TestReport test_vanishing_tetrads(const CovarianceSource& cov, std::span<const Index> a, std::span<const Index> b,
                                  double alpha) {
    check_alpha(alpha);
    auto w = wishart_pvalues(cov, a, b);
    std::vector<StatisticId> ids(w.tetrads.begin(), w.tetrads.end());
    auto report = finish_report(std::move(ids), std::move(w.raw_p), alpha);
    report.degenerate = w.degenerate;
    return report;
}

double fisher_pvalue(double rho, std::int64_t n, std::size_t cond_size) {
    const std::int64_t dof = n - static_cast<std::int64_t>(cond_size) - 3;
    if (dof < 1)
        throw InsufficientSamples("Fisher test needs n - |B| - 3 >= 1 (n = " + std::to_string(n)
                                  + ", |B| = " + std::to_string(cond_size) + ")");
    if (std::isnan(rho)) throw InvalidData("partial correlation is NaN");
    if (std::abs(rho) >= 1.0) return 0.0;
    const double r = std::min(std::abs(rho), 1.0 - 1e-12);
    const double z = std::sqrt(static_cast<double>(dof)) * std::atanh(r);
    return std_normal_two_tailed_p(z);
}

TestReport test_conditional_independence(const CovarianceSource& cov, Index j, std::span<const Index> a,
                                         std::span<const Index> b, double alpha) {
    check_alpha(alpha);
    if (a.empty()) throw EmptyHypothesis("conditional independence test needs a nonempty target set");
    const std::int64_t n = finite_sample_size(cov, 1);
    for (Index k : a) {
        if (k == j) throw IndexError("tested variable appears in its own target set");
        if (std::find(b.begin(), b.end(), k) != b.end()) throw IndexError("target and conditioning sets overlap");
    }
    if (std::find(b.begin(), b.end(), j) != b.end()) throw IndexError("tested variable appears in the conditioning set");

    std::vector<StatisticId> ids;
    std::vector<double> raw;
    ids.reserve(a.size());
    raw.reserve(a.size());
    for (Index k : a) {
        ids.emplace_back(CorrelationIndex{j, k});
        raw.push_back(fisher_pvalue(partial_correlation(cov, j, k, b), n, b.size()));
    }
    return finish_report(std::move(ids), std::move(raw), alpha);
}

}  // namespace lfcm
