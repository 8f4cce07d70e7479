#ifndef LFCM_EVAL_HPP
#define LFCM_EVAL_HPP

#include "lfcm/discovery.hpp"
#include "lfcm/graph.hpp"
#include "lfcm/simulate.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace lfcm {

struct Confusion {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    // Empty when the denominator is zero.
    std::optional<double> fpr() const;
    std::optional<double> tpr() const;
    std::optional<double> precision() const;

    Confusion& operator+=(const Confusion& o);
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Over unordered observed pairs.
using PairConfusion = Confusion;

// Over (observed X, latent L_j) pairs where X's true latent precedes L_j in
// the evaluation ordering. Estimated edges outside that universe, or into an
// estimated latent with no matched true latent, are counted in `unscored`.
struct EdgeConfusion : Confusion {
    std::uint64_t unscored = 0;
};

Confusion cluster_pair_confusion(const std::vector<IndexList>& truth, const std::vector<IndexList>& est);

/// est cluster index -> matched truth latent (or nullopt). Greedy on
/// descending overlap; ties go to the lowest truth latent, then the lowest
/// estimated cluster. Zero-overlap pairs are never matched.
std::vector<std::optional<Index>> match_clusters(const std::vector<IndexList>& truth,
                                                 const std::vector<IndexList>& est);

/// `ordering` lists the true latents upstream first.
EdgeConfusion edge_confusion(const Lfcm& truth, const Lfcm& est, const IndexList& ordering);

/// Same clusters (as sets) under the max-overlap bijection and the same
/// observed->latent edges after relabelling.
bool graphs_equal(const Lfcm& truth, const Lfcm& est);

struct RocPoint {
    double alpha;
    Confusion confusion;
    std::optional<double> fpr, tpr;
};

using Scenario = std::function<Confusion(double alpha)>;

/// One point per alpha, sorted by alpha.
std::vector<RocPoint> roc_sweep(const Scenario& scenario, std::vector<double> alphas);

/// Trapezoid area under (fpr, tpr) points closed with (0,0) and (1,1).
double trapezoid_auc(std::vector<std::pair<double, double>> points);

/// Random permutation of 0..p-1 cut into k contiguous blocks whose sizes
/// differ by at most one.
std::vector<IndexList> random_clustering_baseline(Index p, Index k, std::uint64_t seed);

/// True latents upstream first: topological order of the latent graph.
IndexList latent_ordering(const Lfcm& truth);

/// True clusters arranged as an ordered clustering (downstream first), with
/// position i holding latent ordering[ordering.size() - 1 - i].
OrderedClustering true_ordered_clustering(const Lfcm& truth);

/// Edge stage with the true clusters and ordering, mapped back to true latent
/// ids: (observed, latent) pairs.
std::set<Edge> full_method_edges(const CovarianceSource& cov, const Lfcm& truth, double alpha_ci);

/// As full_method_edges, but tests only the lowest-index child of each latent.
std::set<Edge> single_child_baseline_edges(const CovarianceSource& cov, const Lfcm& truth, double alpha_ci);

/// Tests each observed node against the latent column itself. `full_data`
/// holds every node of the SCM (latents first, as from sample_full).
std::set<Edge> oracle_edges(const Eigen::MatrixXd& full_data, const Lfcm& truth, double alpha_ci);

/// The truth graph with its edge set replaced.
Lfcm with_edges(const Lfcm& truth, std::set<Edge> edges);

}  // namespace lfcm

#endif  // LFCM_EVAL_HPP
