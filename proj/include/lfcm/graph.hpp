#ifndef LFCM_GRAPH_HPP
#define LFCM_GRAPH_HPP

#include "lfcm/linalg.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lfcm {

using Edge = std::pair<Index, Index>;  // (parent, child)

/// Directed acyclic graph over nodes 0..node_count-1. Construction rejects
/// self-loops, duplicate edges and cycles.
class Dag {
public:
    Dag() = default;
    Dag(Index node_count, std::vector<Edge> edges);

    Index node_count() const { return n_; }
    const std::set<Edge>& edges() const { return edges_; }
    const IndexList& parents(Index v) const { return parents_.at(v); }
    const IndexList& children(Index v) const { return children_.at(v); }
    bool has_edge(Index from, Index to) const { return edges_.count({from, to}) > 0; }

    /// Kahn's algorithm, lowest index first among ready nodes.
    IndexList topological_order() const;

    friend bool operator==(const Dag& a, const Dag& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    Index n_ = 0;
    std::set<Edge> edges_;
    std::vector<IndexList> parents_;
    std::vector<IndexList> children_;
};

/// Latent factor causal model: every observed node has exactly one latent
/// parent (cluster_of), and the only other edges run observed -> latent.
/// Observed->observed and latent->latent edges are not representable.
/// Construction checks indices and acyclicity of the full graph; the
/// triple-child and double-parent conditions are checked by validate_lfcm.
class Lfcm {
public:
    Lfcm() = default;
    Lfcm(Index num_latent, std::vector<Index> cluster_of, std::set<Edge> obs_to_latent,
         std::vector<std::string> observed_names = {});

    Index num_latent() const { return k_; }
    Index num_observed() const { return static_cast<Index>(cluster_of_.size()); }
    const std::vector<Index>& cluster_of() const { return cluster_of_; }
    // (observed, latent) pairs.
    const std::set<Edge>& obs_to_latent() const { return obs_to_latent_; }
    const std::vector<std::string>& observed_names() const { return names_; }

    /// Children of each latent, ascending.
    std::vector<IndexList> clusters() const;

    /// Full graph: latent k is node k, observed i is node num_latent + i.
    Dag full_dag() const;
    Index latent_node(Index k) const { return k; }
    Index observed_node(Index i) const { return k_ + i; }

    friend bool operator==(const Lfcm&, const Lfcm&) = default;

private:
    Index k_ = 0;
    std::vector<Index> cluster_of_;
    std::set<Edge> obs_to_latent_;
    std::vector<std::string> names_;
};

struct OrderedClustering {
    std::vector<IndexList> clusters;

    // Throws InvalidData on empty or overlapping clusters.
    void validate() const;
    std::size_t size() const { return clusters.size(); }
    friend bool operator==(const OrderedClustering&, const OrderedClustering&) = default;
};

Dag latent_graph(const Lfcm& g);

struct Violation {
    enum class Kind { TripleChild, DoubleParent };
    Kind kind;
    IndexList nodes;  // TripleChild: {latent}; DoubleParent: {k, k'}
    std::string message;
};

std::vector<Violation> validate_lfcm(const Lfcm& g);

bool d_separated(const Dag& g, Index i, Index j, const std::set<Index>& cond);

inline constexpr Index kTrekEnumerationLimit = 14;

/// Whether (ca, cb) t-separates a from b: every trek (P1, P2) with P1 ending
/// in a and P2 ending in b has P1 meeting ca or P2 meeting cb. Enumerates
/// trek sources; graphs above kTrekEnumerationLimit nodes throw GraphTooLarge.
bool t_separated(const Dag& g, const std::set<Index>& a, const std::set<Index>& b, const std::set<Index>& ca,
                 const std::set<Index>& cb);

/// min |CA| + |CB| over t-separating pairs, by exhaustive subset search.
Index min_tsep_rank_bound(const Dag& g, const std::set<Index>& a, const std::set<Index>& b);

class UndirectedGraph {
public:
    explicit UndirectedGraph(Index n) : n_(n), adj_(n * n, false) {}
    Index size() const { return n_; }
    void add_edge(Index a, Index b);
    bool adjacent(Index a, Index b) const { return adj_[a * n_ + b]; }
    Index degree(Index a) const;

private:
    Index n_;
    std::vector<bool> adj_;
};

/// Maximal clique grown from the highest-degree node (ties to the lowest
/// index) by repeatedly adding the lowest-index node adjacent to every member.
/// Result is sorted ascending.
IndexList greedy_clique(const UndirectedGraph& g);

}  // namespace lfcm

#endif  // LFCM_GRAPH_HPP
