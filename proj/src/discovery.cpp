#include "lfcm/discovery.hpp"

#include "lfcm/errors.hpp"

#include <algorithm>
#include <iterator>

namespace lfcm {

namespace {

IndexList sorted_union(const IndexList& a, const IndexList& b) {
    IndexList out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexList sorted(IndexList v) {
    std::sort(v.begin(), v.end());
    return v;
}

void apply_merge(std::vector<IndexList>& clusters, std::size_t first, std::size_t second) {
    clusters[second] = sorted_union(clusters[first], clusters[second]);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(first));
}

Lfcm assemble(const OrderedClustering& pi, const std::set<Edge>& edges, Index num_observed,
              std::vector<std::string> names) {
    std::vector<Index> cluster_of(num_observed, pi.size());
    for (Index c = 0; c < pi.size(); ++c)
        for (Index x : pi.clusters[c]) {
            if (x >= num_observed) throw IndexError("clustered node out of range");
            cluster_of[x] = c;
        }
    for (Index x = 0; x < num_observed; ++x)
        if (cluster_of[x] == pi.size()) throw InvalidData("observed node " + std::to_string(x) + " is in no cluster");
    return Lfcm(pi.size(), std::move(cluster_of), edges, std::move(names));
}

}  // namespace

void DiscoveryConfig::validate() const {
    if (!(alpha_vt > 0.0 && alpha_vt <= 1.0)) throw InvalidData("alpha_vt must lie in (0, 1]");
    if (!(alpha_ci > 0.0 && alpha_ci <= 1.0)) throw InvalidData("alpha_ci must lie in (0, 1]");
    if (min_clique < 2) throw InvalidData("min_clique must be at least 2");
}

std::pair<OrderedClustering, DiscoveryTrace> find_ordered_clusters(const CovarianceSource& cov,
                                                                   const DiscoveryConfig& cfg) {
    cfg.validate();
    const Index p = cov.dim();
    if (p < 2) throw TooFewVariables("clustering needs at least 2 variables, got " + std::to_string(p));

    DiscoveryTrace trace;
    OrderedClustering pi;
    IndexList remaining(p);
    for (Index v = 0; v < p; ++v) remaining[v] = v;

    while (remaining.size() > 3) {
        DiscoveryTrace::Round round;
        round.remaining = remaining;
        const Index r = remaining.size();
        UndirectedGraph retained(r);
        for (Index a = 0; a < r; ++a) {
            for (Index b = a + 1; b < r; ++b) {
                const IndexList pair{remaining[a], remaining[b]};
                IndexList rest;
                rest.reserve(r - 2);
                for (Index c = 0; c < r; ++c)
                    if (c != a && c != b) rest.push_back(remaining[c]);
                const TestReport report = test_vanishing_tetrads(cov, pair, rest, cfg.alpha_vt);
                round.pair_tests.push_back(
                    {pair[0], pair[1], report.raw_p.size(), report.min_adjusted_p(), report.reject});
                if (!report.reject) retained.add_edge(a, b);
            }
        }
        const IndexList local = greedy_clique(retained);
        for (Index a : local) round.clique.push_back(remaining[a]);
        round.accepted = round.clique.size() >= cfg.min_clique;
        trace.rounds.push_back(round);
        if (!round.accepted) break;

        pi.clusters.push_back(round.clique);
        IndexList next;
        std::set_difference(remaining.begin(), remaining.end(), round.clique.begin(), round.clique.end(),
                            std::back_inserter(next));
        remaining = std::move(next);
    }
    if (!remaining.empty()) {
        trace.residual = remaining;
        pi.clusters.push_back(remaining);
    }
    trace.stage1 = pi;
    return {pi, std::move(trace)};
}

OrderedClustering merge_clusters(const CovarianceSource& cov, const OrderedClustering& pi, const DiscoveryConfig& cfg,
                                 DiscoveryTrace* trace) {
    cfg.validate();
    pi.validate();
    std::vector<IndexList> clusters;
    for (const auto& c : pi.clusters) clusters.push_back(sorted(c));

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < clusters.size() && !changed; ++a) {
            for (std::size_t b = a + 1; b < clusters.size() && !changed; ++b) {
                const IndexList both = sorted_union(clusters[a], clusters[b]);
                DiscoveryTrace::MergeStep step{clusters[a], clusters[b], 0, 1.0, false};
                if (both.size() >= 4) {
                    const TestReport report = test_vanishing_tetrads(cov, both, both, cfg.alpha_vt);
                    step.num_tetrads = report.raw_p.size();
                    step.min_adjusted_p = report.min_adjusted_p();
                    step.merged = !report.reject;
                }
                if (trace) trace->merges.push_back(step);
                if (step.merged) {
                    apply_merge(clusters, a, b);
                    changed = true;
                }
            }
        }
    }
    OrderedClustering out{std::move(clusters)};
    if (trace) trace->merged = out;
    return out;
}

std::set<Edge> learn_edges(const CovarianceSource& cov, const OrderedClustering& pi,
                           const std::vector<IndexList>& targets, double alpha, DiscoveryTrace* trace) {
    pi.validate();
    if (targets.size() != pi.size()) throw ShapeError("need one target set per cluster");
    std::set<Edge> edges;
    for (Index i = 0; i < pi.size(); ++i) {
        IndexList upstream;
        for (Index k = i + 1; k < pi.size(); ++k)
            upstream.insert(upstream.end(), pi.clusters[k].begin(), pi.clusters[k].end());
        std::sort(upstream.begin(), upstream.end());
        for (Index xj : upstream) {
            IndexList cond;
            cond.reserve(upstream.size() - 1);
            for (Index s : upstream)
                if (s != xj) cond.push_back(s);
            const TestReport report = test_conditional_independence(cov, xj, targets[i], cond, alpha);
            if (report.reject) edges.insert({xj, i});
            if (trace) trace->edge_tests.push_back({xj, i, cond, report.min_adjusted_p(), report.reject});
        }
    }
    return edges;
}

Lfcm learn_dag(const CovarianceSource& cov, const OrderedClustering& pi, const DiscoveryConfig& cfg,
               std::vector<std::string> names, DiscoveryTrace* trace) {
    cfg.validate();
    std::vector<IndexList> targets;
    for (const auto& c : pi.clusters) targets.push_back(sorted(c));
    const auto edges = learn_edges(cov, pi, targets, cfg.alpha_ci, trace);
    return assemble(pi, edges, cov.dim(), std::move(names));
}

std::pair<Lfcm, DiscoveryTrace> estimate_lfcm(const CovarianceSource& cov, const DiscoveryConfig& cfg,
                                              std::vector<std::string> names) {
    auto [stage1, trace] = find_ordered_clusters(cov, cfg);
    const OrderedClustering merged = merge_clusters(cov, stage1, cfg, &trace);
    Lfcm g = learn_dag(cov, merged, cfg, std::move(names), &trace);
    return {std::move(g), std::move(trace)};
}

std::pair<Lfcm, DiscoveryTrace> estimate_lfcm(const DataMatrix& data, const DiscoveryConfig& cfg) {
    return estimate_lfcm(sample_covariance(data), cfg, data.column_names());
}

Lfcm replay_trace(const DiscoveryTrace& trace, Index num_observed, std::vector<std::string> names) {
    std::vector<IndexList> clusters;
    for (const auto& round : trace.rounds)
        if (round.accepted) clusters.push_back(round.clique);
    if (!trace.residual.empty()) clusters.push_back(trace.residual);

    for (const auto& step : trace.merges) {
        if (!step.merged) continue;
        const auto first = std::find(clusters.begin(), clusters.end(), step.first);
        const auto second = std::find(clusters.begin(), clusters.end(), step.second);
        if (first == clusters.end() || second == clusters.end() || first >= second)
            throw InvalidData("trace merge step does not match the replayed clustering");
        apply_merge(clusters, static_cast<std::size_t>(first - clusters.begin()),
                    static_cast<std::size_t>(second - clusters.begin()));
    }

    std::set<Edge> edges;
    for (const auto& t : trace.edge_tests)
        if (t.edge) edges.insert({t.observed, t.latent});
    return assemble(OrderedClustering{std::move(clusters)}, edges, num_observed, std::move(names));
}

}  // namespace lfcm
