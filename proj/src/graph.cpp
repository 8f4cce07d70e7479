#include "lfcm/graph.hpp"

#include "lfcm/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <queue>

namespace lfcm {

namespace {

void check_node(Index v, Index n, const char* what) {
    if (v >= n) throw IndexError(std::string(what) + " " + std::to_string(v) + " out of range");
}

// Nodes from which some target is reachable along a directed path that
// avoids `blocked` entirely (source and sink included).
std::vector<bool> unblocked_ancestors(const Dag& g, const std::set<Index>& targets, const std::set<Index>& blocked) {
    std::vector<bool> mark(g.node_count(), false);
    std::deque<Index> queue;
    for (Index t : targets) {
        if (blocked.count(t) || mark[t]) continue;
        mark[t] = true;
        queue.push_back(t);
    }
    while (!queue.empty()) {
        const Index v = queue.front();
        queue.pop_front();
        for (Index p : g.parents(v)) {
            if (mark[p] || blocked.count(p)) continue;
            mark[p] = true;
            queue.push_back(p);
        }
    }
    return mark;
}

// All k-subsets of `pool`, passed to `visit` until it returns true.
bool for_each_subset(const IndexList& pool, Index k, const std::function<bool(const std::set<Index>&)>& visit) {
    if (k > pool.size()) return false;
    std::vector<Index> pick(k);
    for (Index a = 0; a < k; ++a) pick[a] = a;
    while (true) {
        std::set<Index> subset;
        for (Index a : pick) subset.insert(pool[a]);
        if (visit(subset)) return true;
        // Next combination in lexicographic order.
        Index pos = k;
        while (pos > 0 && pick[pos - 1] == pool.size() - k + pos - 1) --pos;
        if (pos == 0) return false;
        ++pick[pos - 1];
        for (Index b = pos; b < k; ++b) pick[b] = pick[b - 1] + 1;
    }
}

}  // namespace

Dag::Dag(Index node_count, std::vector<Edge> edges) : n_(node_count), parents_(node_count), children_(node_count) {
    for (const auto& [from, to] : edges) {
        check_node(from, n_, "edge endpoint");
        check_node(to, n_, "edge endpoint");
        if (from == to) throw InvalidGraph("self-loop on node " + std::to_string(from));
        if (!edges_.insert({from, to}).second)
            throw InvalidGraph("duplicate edge " + std::to_string(from) + " -> " + std::to_string(to));
        parents_[to].push_back(from);
        children_[from].push_back(to);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
    if (topological_order().size() != n_) throw InvalidGraph("graph contains a directed cycle");
}

IndexList Dag::topological_order() const {
    std::vector<Index> indegree(n_);
    for (Index v = 0; v < n_; ++v) indegree[v] = parents_[v].size();
    std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
    for (Index v = 0; v < n_; ++v)
        if (indegree[v] == 0) ready.push(v);
    IndexList order;
    order.reserve(n_);
    while (!ready.empty()) {
        const Index v = ready.top();
        ready.pop();
        order.push_back(v);
        for (Index c : children_[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    return order;
}

Lfcm::Lfcm(Index num_latent, std::vector<Index> cluster_of, std::set<Edge> obs_to_latent,
           std::vector<std::string> observed_names)
    : k_(num_latent), cluster_of_(std::move(cluster_of)), obs_to_latent_(std::move(obs_to_latent)),
      names_(std::move(observed_names)) {
    const Index p = cluster_of_.size();
    if (names_.empty()) {
        for (Index i = 0; i < p; ++i) names_.push_back("X" + std::to_string(i));
    }
    if (names_.size() != p) throw ShapeError("observed_names and cluster_of differ in length");
    for (Index i = 0; i < p; ++i) check_node(cluster_of_[i], k_, "latent parent");
    for (const auto& [x, l] : obs_to_latent_) {
        check_node(x, p, "observed node");
        check_node(l, k_, "latent node");
    }
    (void)full_dag();  // throws on cycles
}

std::vector<IndexList> Lfcm::clusters() const {
    std::vector<IndexList> out(k_);
    for (Index i = 0; i < cluster_of_.size(); ++i) out[cluster_of_[i]].push_back(i);
    return out;
}

Dag Lfcm::full_dag() const {
    std::vector<Edge> edges;
    edges.reserve(cluster_of_.size() + obs_to_latent_.size());
    for (Index i = 0; i < cluster_of_.size(); ++i) edges.emplace_back(latent_node(cluster_of_[i]), observed_node(i));
    for (const auto& [x, l] : obs_to_latent_) edges.emplace_back(observed_node(x), latent_node(l));
    try {
        return Dag(k_ + cluster_of_.size(), std::move(edges));
    } catch (const InvalidGraph& e) {
        throw InvalidGraph(std::string("LFCM full graph: ") + e.what());
    }
}

void OrderedClustering::validate() const {
    std::set<Index> seen;
    for (const auto& c : clusters) {
        if (c.empty()) throw InvalidData("ordered clustering contains an empty cluster");
        for (Index v : c)
            if (!seen.insert(v).second) throw InvalidData("node " + std::to_string(v) + " appears in two clusters");
    }
}

Dag latent_graph(const Lfcm& g) {
    std::set<Edge> edges;
    for (const auto& [x, l] : g.obs_to_latent()) edges.insert({g.cluster_of()[x], l});
    return Dag(g.num_latent(), std::vector<Edge>(edges.begin(), edges.end()));
}

std::vector<Violation> validate_lfcm(const Lfcm& g) {
    std::vector<Violation> out;
    const auto clusters = g.clusters();
    for (Index k = 0; k < g.num_latent(); ++k) {
        if (clusters[k].size() < 3)
            out.push_back({Violation::Kind::TripleChild, {k},
                           "latent " + std::to_string(k) + " has " + std::to_string(clusters[k].size())
                               + " observed children (needs at least 3)"});
    }
    std::map<Edge, Index> support;  // latent edge -> number of distinct observed parents
    for (const auto& [x, l] : g.obs_to_latent()) ++support[{g.cluster_of()[x], l}];
    for (const auto& [edge, count] : support) {
        if (count < 2)
            out.push_back({Violation::Kind::DoubleParent, {edge.first, edge.second},
                           "latent edge " + std::to_string(edge.first) + " -> " + std::to_string(edge.second)
                               + " is carried by a single observed node"});
    }
    return out;
}

bool d_separated(const Dag& g, Index i, Index j, const std::set<Index>& cond) {
    const Index n = g.node_count();
    check_node(i, n, "node");
    check_node(j, n, "node");
    if (i == j) throw IndexError("d-separation needs two distinct nodes");
    if (cond.count(i) || cond.count(j)) throw IndexError("endpoints may not be in the conditioning set");

    // Ancestors of the conditioning set, itself included.
    std::vector<bool> anc(n, false);
    std::deque<Index> work(cond.begin(), cond.end());
    for (Index c : cond) {
        check_node(c, n, "node");
        anc[c] = true;
    }
    while (!work.empty()) {
        const Index v = work.front();
        work.pop_front();
        for (Index p : g.parents(v))
            if (!anc[p]) {
                anc[p] = true;
                work.push_back(p);
            }
    }

    // Bayes ball over (node, arrived-from-child) states.
    std::vector<std::array<bool, 2>> seen(n, {false, false});
    std::deque<std::pair<Index, bool>> queue{{i, true}};
    while (!queue.empty()) {
        const auto [v, up] = queue.front();
        queue.pop_front();
        if (seen[v][up ? 1 : 0]) continue;
        seen[v][up ? 1 : 0] = true;
        const bool observed = cond.count(v) > 0;
        if (!observed && v == j) return false;
        if (up && !observed) {
            for (Index p : g.parents(v)) queue.emplace_back(p, true);
            for (Index c : g.children(v)) queue.emplace_back(c, false);
        } else if (!up) {
            if (!observed)
                for (Index c : g.children(v)) queue.emplace_back(c, false);
            if (anc[v])
                for (Index p : g.parents(v)) queue.emplace_back(p, true);
        }
    }
    return true;
}

bool t_separated(const Dag& g, const std::set<Index>& a, const std::set<Index>& b, const std::set<Index>& ca,
                 const std::set<Index>& cb) {
    if (g.node_count() > kTrekEnumerationLimit)
        throw GraphTooLarge("trek enumeration is limited to " + std::to_string(kTrekEnumerationLimit) + " nodes");
    for (const auto* s : {&a, &b, &ca, &cb})
        for (Index v : *s) check_node(v, g.node_count(), "node");
    // A trek source k with an a-path avoiding ca and a b-path avoiding cb is
    // an unblocked trek.
    const auto left = unblocked_ancestors(g, a, ca);
    const auto right = unblocked_ancestors(g, b, cb);
    for (Index k = 0; k < g.node_count(); ++k)
        if (left[k] && right[k]) return false;
    return true;
}

Index min_tsep_rank_bound(const Dag& g, const std::set<Index>& a, const std::set<Index>& b) {
    if (g.node_count() > kTrekEnumerationLimit)
        throw GraphTooLarge("trek enumeration is limited to " + std::to_string(kTrekEnumerationLimit) + " nodes");
    IndexList pool(g.node_count());
    for (Index v = 0; v < pool.size(); ++v) pool[v] = v;
    const Index upper = std::min(a.size(), b.size());
    for (Index total = 0; total < upper; ++total) {
        for (Index left = 0; left <= total; ++left) {
            const bool found = for_each_subset(pool, left, [&](const std::set<Index>& ca) {
                return for_each_subset(pool, total - left,
                                       [&](const std::set<Index>& cb) { return t_separated(g, a, b, ca, cb); });
            });
            if (found) return total;
        }
    }
    return upper;  // (a, {}) always t-separates
}

void UndirectedGraph::add_edge(Index a, Index b) {
    check_node(a, n_, "node");
    check_node(b, n_, "node");
    if (a == b) return;
    adj_[a * n_ + b] = true;
    adj_[b * n_ + a] = true;
}

Index UndirectedGraph::degree(Index a) const {
    Index d = 0;
    for (Index b = 0; b < n_; ++b) d += adjacent(a, b) ? 1 : 0;
    return d;
}

IndexList greedy_clique(const UndirectedGraph& g) {
    if (g.size() == 0) return {};
    Index seed = 0;
    Index best = g.degree(0);
    for (Index v = 1; v < g.size(); ++v) {
        const Index d = g.degree(v);
        if (d > best) {
            best = d;
            seed = v;
        }
    }
    IndexList clique{seed};
    bool grew = true;
    while (grew) {
        grew = false;
        for (Index v = 0; v < g.size(); ++v) {
            if (std::find(clique.begin(), clique.end(), v) != clique.end()) continue;
            const bool fits = std::all_of(clique.begin(), clique.end(), [&](Index m) { return g.adjacent(v, m); });
            if (fits) {
                clique.push_back(v);
                grew = true;
                break;
            }
        }
    }
    std::sort(clique.begin(), clique.end());
    return clique;
}

}  // namespace lfcm
