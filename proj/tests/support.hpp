// Independent oracles and fixtures shared by the test binaries. Nothing here
// calls into the code paths it is used to check.
#ifndef LFCM_TESTS_SUPPORT_HPP
#define LFCM_TESTS_SUPPORT_HPP

#include "lfcm/graph.hpp"
#include "lfcm/simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace lfcm::testing {

// 2 * (1/2 - integral_0^|z| phi) by composite Simpson with 20000 panels.
inline double two_tailed_p_by_quadrature(double z) {
    const double a = 0.0, b = std::abs(z);
    if (b == 0.0) return 1.0;
    const int panels = 20000;
    const double h = (b - a) / panels;
    auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    double s = phi(a) + phi(b);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * phi(a + k * h);
    return 2.0 * (0.5 - s * h / 3.0);
}

// Covariance by the textbook double loop, divisor n-1.
inline Eigen::MatrixXd covariance_by_loops(const Eigen::MatrixXd& x) {
    const auto n = x.rows(), p = x.cols();
    Eigen::MatrixXd s(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        double ma = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) ma += x(r, a);
        ma /= static_cast<double>(n);
        for (Eigen::Index b = 0; b < p; ++b) {
            double mb = 0.0;
            for (Eigen::Index r = 0; r < n; ++r) mb += x(r, b);
            mb /= static_cast<double>(n);
            double acc = 0.0;
            for (Eigen::Index r = 0; r < n; ++r) acc += (x(r, a) - ma) * (x(r, b) - mb);
            s(a, b) = acc / static_cast<double>(n - 1);
        }
    }
    return s;
}

// Every directed path (as node list) starting at `from`.
inline void directed_paths_from(const Dag& g, Index from, std::vector<Index>& path,
                                const std::function<void(const std::vector<Index>&)>& visit) {
    path.push_back(from);
    visit(path);
    for (Index c : g.children(from)) directed_paths_from(g, c, path, visit);
    path.pop_back();
}

// Literal trek enumeration: for each source, each pair of directed paths
// ending in a and b; separated unless some pair avoids ca on the left and cb
// on the right.
inline bool t_separated_by_paths(const Dag& g, const std::set<Index>& a, const std::set<Index>& b,
                                 const std::set<Index>& ca, const std::set<Index>& cb) {
    for (Index src = 0; src < g.node_count(); ++src) {
        std::vector<std::vector<Index>> left, right;
        std::vector<Index> buf;
        directed_paths_from(g, src, buf, [&](const std::vector<Index>& p) {
            if (a.count(p.back())) left.push_back(p);
            if (b.count(p.back())) right.push_back(p);
        });
        auto avoids = [](const std::vector<Index>& p, const std::set<Index>& c) {
            for (Index v : p)
                if (c.count(v)) return false;
            return true;
        };
        bool left_open = false, right_open = false;
        for (const auto& p : left) left_open = left_open || avoids(p, ca);
        for (const auto& p : right) right_open = right_open || avoids(p, cb);
        if (left_open && right_open) return false;
    }
    return true;
}

// d-separation by enumerating every simple undirected path and applying the
// collider/non-collider blocking rules directly.
inline bool d_separated_by_paths(const Dag& g, Index i, Index j, const std::set<Index>& cond) {
    const Index n = g.node_count();
    std::vector<std::set<Index>> desc(n);
    for (Index v = 0; v < n; ++v) {
        std::vector<Index> stack{v};
        while (!stack.empty()) {
            const Index u = stack.back();
            stack.pop_back();
            if (!desc[v].insert(u).second) continue;
            for (Index c : g.children(u)) stack.push_back(c);
        }
    }
    auto collider_open = [&](Index m) {
        for (Index d : desc[m])
            if (cond.count(d)) return true;
        return false;
    };
    std::vector<Index> path{i};
    std::vector<bool> on_path(n, false);
    on_path[i] = true;
    std::function<bool(Index)> search = [&](Index v) -> bool {
        if (v == j) {
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                const Index prev = path[k - 1], mid = path[k], next = path[k + 1];
                const bool collider = g.has_edge(prev, mid) && g.has_edge(next, mid);
                if (collider ? !collider_open(mid) : cond.count(mid) > 0) return false;
            }
            return true;  // open path
        }
        std::vector<Index> nbrs(g.parents(v).begin(), g.parents(v).end());
        nbrs.insert(nbrs.end(), g.children(v).begin(), g.children(v).end());
        for (Index w : nbrs) {
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(w);
            const bool open = search(w);
            path.pop_back();
            on_path[w] = false;
            if (open) return true;
        }
        return false;
    };
    return !search(i);
}

// Random DAG: nodes in a random order, each forward pair with probability p.
inline Dag random_dag(Index n, double p, std::mt19937_64& rng) {
    std::vector<Index> order(n);
    for (Index v = 0; v < n; ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution keep(p);
    std::vector<Edge> edges;
    for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b)
            if (keep(rng)) edges.emplace_back(order[a], order[b]);
    return Dag(n, edges);
}

// Linear SCM on `g` with weights of magnitude in [0.25, 1], random sign, and
// noise variances in [0.5, 1.5].
inline LinearScm random_scm(const Dag& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.25, 1.0), noise(0.5, 1.5);
    std::bernoulli_distribution neg(0.5);
    std::map<Edge, double> w;
    for (const auto& e : g.edges()) w[e] = (neg(rng) ? -1.0 : 1.0) * mag(rng);
    std::vector<double> d(g.node_count());
    for (auto& v : d) v = noise(rng);
    return LinearScm(g, w, d);
}

// Figure-style LFCM: L0 with children X0..X3, L1 with children X4..X6, and
// the two children X0, X1 of L0 feeding L1.
inline Lfcm two_cluster_lfcm() {
    return Lfcm(2, {0, 0, 0, 0, 1, 1, 1}, {{0, 1}, {1, 1}});
}

// Size of the largest clique, by checking every subset.
inline Index max_clique_size(const UndirectedGraph& g) {
    const Index n = g.size();
    Index best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<Index> members;
        for (Index v = 0; v < n; ++v)
            if (mask >> v & 1U) members.push_back(v);
        bool clique = true;
        for (std::size_t a = 0; a < members.size() && clique; ++a)
            for (std::size_t b = a + 1; b < members.size() && clique; ++b) clique = g.adjacent(members[a], members[b]);
        if (clique) best = std::max<Index>(best, members.size());
    }
    return best;
}

}  // namespace lfcm::testing

#endif  // LFCM_TESTS_SUPPORT_HPP
