#ifndef LFCM_SIMULATE_HPP
#define LFCM_SIMULATE_HPP

#include "lfcm/graph.hpp"
#include "lfcm/linalg.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lfcm {

struct GeneratorConfig {
    Index num_latent = 10;
    double latent_edge_prob = 0.5;
    Index children_min = 3;
    Index children_max = 6;
    double weight_min = 0.25;
    double weight_max = 1.0;
    Index calibration_samples = 1000;
    double root_noise_var = 1.0;
    double parented_noise_var = 0.5;
    std::uint64_t seed = 0;

    // Throws InvalidData when the config cannot produce a valid LFCM.
    void validate() const;
};

/// Linear Gaussian SCM over a DAG. Nodes below num_latent are latent and are
/// dropped from observed data and from population_covariance.
class LinearScm {
public:
    LinearScm(Dag graph, std::map<Edge, double> weights, std::vector<double> noise_var, Index num_latent = 0,
              std::vector<std::string> node_names = {});

    const Dag& graph() const { return graph_; }
    const std::map<Edge, double>& weights() const { return weights_; }
    const std::vector<double>& noise_var() const { return noise_var_; }
    const std::vector<std::string>& node_names() const { return names_; }
    Index num_latent() const { return num_latent_; }
    Index num_nodes() const { return graph_.node_count(); }
    Index num_observed() const { return num_nodes() - num_latent_; }
    std::vector<std::string> observed_names() const;

private:
    Dag graph_;
    std::map<Edge, double> weights_;
    std::vector<double> noise_var_;
    Index num_latent_ = 0;
    std::vector<std::string> names_;
};

Lfcm random_lfcm(const GeneratorConfig& cfg);

/// Weight normalisation: for each parented node, initial weights of random
/// sign and magnitude in [weight_min, weight_max] are rescaled by
/// (2 s)^(-1/2), s being the sample variance of the parental contribution
/// over calibration_samples draws of the upstream SEM. The node noise variance
/// is parented_noise_var, so parents contribute about half of a unit variance.
LinearScm parameterize(const Lfcm& g, const GeneratorConfig& cfg);

/// All node columns (latent first), n rows. Noise for each node comes from
/// its own substream of `seed`.
Eigen::MatrixXd sample_full(const LinearScm& scm, Index n, std::uint64_t seed);

/// Observed columns only, named after the observed nodes.
DataMatrix sample_data(const LinearScm& scm, Index n, std::uint64_t seed);

/// (I - A)^{-1} D (I - A)^{-T} over all nodes.
Eigen::MatrixXd full_population_covariance(const LinearScm& scm);

/// Observed block of the full covariance, n_eff infinite.
CovarianceSource population_covariance(const LinearScm& scm);

}  // namespace lfcm

#endif  // LFCM_SIMULATE_HPP
