#include "lfcm/eval.hpp"

#include "lfcm/errors.hpp"
#include "lfcm/rng.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace lfcm {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

// node -> cluster label, plus the covered node set.
std::vector<Index> labels_of(const std::vector<IndexList>& clustering, Index p) {
    std::vector<Index> label(p, clustering.size());
    for (Index c = 0; c < clustering.size(); ++c)
        for (Index v : clustering[c]) {
            if (v >= p) throw DomainMismatch("clustering refers to node " + std::to_string(v));
            if (label[v] != clustering.size()) throw DomainMismatch("node " + std::to_string(v) + " in two clusters");
            label[v] = c;
        }
    return label;
}

Index max_node(const std::vector<IndexList>& clustering) {
    Index m = 0;
    for (const auto& c : clustering)
        for (Index v : c) m = std::max(m, v + 1);
    return m;
}

std::set<Edge> edges_on_true_clusters(const CovarianceSource& cov, const Lfcm& truth, double alpha,
                                      bool single_child) {
    const OrderedClustering pi = true_ordered_clustering(truth);
    const IndexList order = latent_ordering(truth);
    std::vector<IndexList> targets;
    for (const auto& c : pi.clusters) targets.push_back(single_child ? IndexList{c.front()} : c);
    std::set<Edge> out;
    for (const auto& [x, pos] : learn_edges(cov, pi, targets, alpha)) out.insert({x, order[order.size() - 1 - pos]});
    return out;
}

}  // namespace

std::optional<double> Confusion::fpr() const { return ratio(fp, fp + tn); }
std::optional<double> Confusion::tpr() const { return ratio(tp, tp + fn); }
std::optional<double> Confusion::precision() const { return ratio(tp, tp + fp); }

Confusion& Confusion::operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
}

Confusion cluster_pair_confusion(const std::vector<IndexList>& truth, const std::vector<IndexList>& est) {
    const Index p = std::max(max_node(truth), max_node(est));
    const auto lt = labels_of(truth, p);
    const auto le = labels_of(est, p);
    for (Index v = 0; v < p; ++v) {
        const bool in_truth = lt[v] != truth.size();
        const bool in_est = le[v] != est.size();
        if (in_truth != in_est) throw DomainMismatch("node " + std::to_string(v) + " is covered by only one clustering");
    }
    Confusion c;
    for (Index a = 0; a < p; ++a) {
        if (lt[a] == truth.size()) continue;
        for (Index b = a + 1; b < p; ++b) {
            if (lt[b] == truth.size()) continue;
            const bool same_truth = lt[a] == lt[b];
            const bool same_est = le[a] == le[b];
            if (same_truth && same_est) ++c.tp;
            else if (!same_truth && same_est) ++c.fp;
            else if (same_truth) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

std::vector<std::optional<Index>> match_clusters(const std::vector<IndexList>& truth,
                                                 const std::vector<IndexList>& est) {
    std::vector<std::tuple<Index, Index, Index>> cands;  // (overlap, truth, est)
    for (Index t = 0; t < truth.size(); ++t) {
        const std::set<Index> ts(truth[t].begin(), truth[t].end());
        for (Index e = 0; e < est.size(); ++e) {
            Index overlap = 0;
            for (Index v : est[e]) overlap += ts.count(v);
            if (overlap > 0) cands.emplace_back(overlap, t, e);
        }
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<2>(a) < std::get<2>(b);
    });
    std::vector<std::optional<Index>> match(est.size());
    std::vector<bool> used(truth.size(), false);
    for (const auto& [overlap, t, e] : cands) {
        if (used[t] || match[e]) continue;
        used[t] = true;
        match[e] = t;
    }
    return match;
}

EdgeConfusion edge_confusion(const Lfcm& truth, const Lfcm& est, const IndexList& ordering) {
    if (truth.num_observed() != est.num_observed())
        throw DomainMismatch("graphs have different numbers of observed nodes");
    const Index k = truth.num_latent();
    std::vector<Index> rank(k, k);
    for (Index r = 0; r < ordering.size(); ++r) {
        if (ordering[r] >= k || rank[ordering[r]] != k) throw InvalidData("ordering is not a permutation of the latents");
        rank[ordering[r]] = r;
    }
    if (ordering.size() != k) throw InvalidData("ordering is not a permutation of the latents");

    const auto match = match_clusters(truth.clusters(), est.clusters());
    std::set<Edge> predicted;
    EdgeConfusion c;
    for (const auto& [x, l] : est.obs_to_latent()) {
        const auto& m = match[l];
        if (m && rank[truth.cluster_of()[x]] < rank[*m]) predicted.insert({x, *m});
        else ++c.unscored;
    }
    for (Index x = 0; x < truth.num_observed(); ++x) {
        const Index own = rank[truth.cluster_of()[x]];
        for (Index r = own + 1; r < k; ++r) {
            const Edge e{x, ordering[r]};
            const bool t = truth.obs_to_latent().count(e) > 0;
            const bool p = predicted.count(e) > 0;
            if (t && p) ++c.tp;
            else if (p) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

bool graphs_equal(const Lfcm& truth, const Lfcm& est) {
    if (truth.num_observed() != est.num_observed() || truth.num_latent() != est.num_latent()) return false;
    const auto tc = truth.clusters();
    const auto ec = est.clusters();
    const auto match = match_clusters(tc, ec);
    for (Index e = 0; e < ec.size(); ++e)
        if (!match[e] || tc[*match[e]] != ec[e]) return false;
    std::set<Edge> mapped;
    for (const auto& [x, l] : est.obs_to_latent()) mapped.insert({x, *match[l]});
    return mapped == truth.obs_to_latent();
}

std::vector<RocPoint> roc_sweep(const Scenario& scenario, std::vector<double> alphas) {
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw InvalidData("alphas must lie in (0, 1)");
    std::sort(alphas.begin(), alphas.end());
    std::vector<RocPoint> out;
    for (double a : alphas) {
        const Confusion c = scenario(a);
        out.push_back({a, c, c.fpr(), c.tpr()});
    }
    return out;
}

double trapezoid_auc(std::vector<std::pair<double, double>> points) {
    points.emplace_back(0.0, 0.0);
    points.emplace_back(1.0, 1.0);
    std::sort(points.begin(), points.end());
    double area = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k)
        area += (points[k].first - points[k - 1].first) * 0.5 * (points[k].second + points[k - 1].second);
    return area;
}

std::vector<IndexList> random_clustering_baseline(Index p, Index k, std::uint64_t seed) {
    if (k < 1 || k > p) throw InvalidData("random clustering needs 1 <= K <= p");
    IndexList perm(p);
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng = make_rng(seed, {kBaseline});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<IndexList> out(k);
    const Index base = p / k, extra = p % k;
    Index pos = 0;
    for (Index c = 0; c < k; ++c) {
        const Index size = base + (c < extra ? 1 : 0);
        out[c].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(out[c].begin(), out[c].end());
        pos += size;
    }
    return out;
}

IndexList latent_ordering(const Lfcm& truth) { return latent_graph(truth).topological_order(); }

OrderedClustering true_ordered_clustering(const Lfcm& truth) {
    const IndexList order = latent_ordering(truth);
    const auto clusters = truth.clusters();
    OrderedClustering pi;
    for (auto it = order.rbegin(); it != order.rend(); ++it) pi.clusters.push_back(clusters[*it]);
    return pi;
}

std::set<Edge> full_method_edges(const CovarianceSource& cov, const Lfcm& truth, double alpha_ci) {
    return edges_on_true_clusters(cov, truth, alpha_ci, false);
}

std::set<Edge> single_child_baseline_edges(const CovarianceSource& cov, const Lfcm& truth, double alpha_ci) {
    return edges_on_true_clusters(cov, truth, alpha_ci, true);
}

std::set<Edge> oracle_edges(const Eigen::MatrixXd& full_data, const Lfcm& truth, double alpha_ci) {
    const Index k = truth.num_latent();
    if (static_cast<Index>(full_data.cols()) != k + truth.num_observed())
        throw ShapeError("oracle needs every latent and observed column");
    const CovarianceSource cov = sample_covariance(DataMatrix(full_data));
    const OrderedClustering pi = true_ordered_clustering(truth);
    const IndexList order = latent_ordering(truth);

    // Observed nodes sit after the latent columns.
    OrderedClustering shifted;
    std::vector<IndexList> targets;
    for (Index pos = 0; pos < pi.size(); ++pos) {
        IndexList c;
        for (Index x : pi.clusters[pos]) c.push_back(truth.observed_node(x));
        shifted.clusters.push_back(std::move(c));
        targets.push_back({truth.latent_node(order[order.size() - 1 - pos])});
    }
    std::set<Edge> out;
    for (const auto& [node, pos] : learn_edges(cov, shifted, targets, alpha_ci))
        out.insert({node - k, order[order.size() - 1 - pos]});
    return out;
}

Lfcm with_edges(const Lfcm& truth, std::set<Edge> edges) {
    return Lfcm(truth.num_latent(), truth.cluster_of(), std::move(edges), truth.observed_names());
}

}  // namespace lfcm
