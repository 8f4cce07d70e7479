#ifndef LFCM_DISCOVERY_HPP
#define LFCM_DISCOVERY_HPP

#include "lfcm/graph.hpp"
#include "lfcm/linalg.hpp"
#include "lfcm/stats.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lfcm {

struct DiscoveryConfig {
    double alpha_vt = 0.01;
    double alpha_ci = 0.1;
    Index min_clique = 2;

    void validate() const;
};

// Everything the pipeline decided, in order. Enough to rebuild the output
// without the data (see replay_trace).
struct DiscoveryTrace {
    struct PairTest {
        Index i, j;
        std::size_t num_tetrads;
        double min_adjusted_p;
        bool reject;
    };
    struct Round {
        IndexList remaining;
        std::vector<PairTest> pair_tests;
        IndexList clique;
        bool accepted;  // clique reached min_clique and was appended
    };
    struct MergeStep {
        IndexList first, second;  // first precedes second in the ordering
        std::size_t num_tetrads;
        double min_adjusted_p;
        bool merged;
    };
    struct EdgeTest {
        Index observed;
        Index latent;  // cluster position in the final ordering
        IndexList conditioning;
        double min_adjusted_p;
        bool edge;
    };

    std::vector<Round> rounds;
    IndexList residual;
    OrderedClustering stage1;
    std::vector<MergeStep> merges;
    OrderedClustering merged;
    std::vector<EdgeTest> edge_tests;
};

std::pair<OrderedClustering, DiscoveryTrace> find_ordered_clusters(const CovarianceSource& cov,
                                                                   const DiscoveryConfig& cfg);

// The merged cluster takes the later of the two positions.
OrderedClustering merge_clusters(const CovarianceSource& cov, const OrderedClustering& pi, const DiscoveryConfig& cfg,
                                 DiscoveryTrace* trace = nullptr);

/// Edge tests of the last stage with caller-chosen target sets. Clusters
/// later in `pi` are upstream. For cluster i and every observed X_j in a
/// later cluster, S is the union of all later clusters minus X_j, and the
/// edge X_j -> L_i is kept when H_ci(X_j, targets[i] | S) is rejected.
/// Returns (observed index, cluster position) pairs.
std::set<Edge> learn_edges(const CovarianceSource& cov, const OrderedClustering& pi,
                           const std::vector<IndexList>& targets, double alpha, DiscoveryTrace* trace = nullptr);

/// One latent per cluster (latent i = pi.clusters[i]) with edges from
/// learn_edges using each cluster's own children as targets.
Lfcm learn_dag(const CovarianceSource& cov, const OrderedClustering& pi, const DiscoveryConfig& cfg,
               std::vector<std::string> names = {}, DiscoveryTrace* trace = nullptr);

std::pair<Lfcm, DiscoveryTrace> estimate_lfcm(const DataMatrix& data, const DiscoveryConfig& cfg);
std::pair<Lfcm, DiscoveryTrace> estimate_lfcm(const CovarianceSource& cov, const DiscoveryConfig& cfg,
                                              std::vector<std::string> names = {});

/// Rebuild the estimated graph from a trace alone.
Lfcm replay_trace(const DiscoveryTrace& trace, Index num_observed, std::vector<std::string> names = {});

}  // namespace lfcm

#endif  // LFCM_DISCOVERY_HPP
