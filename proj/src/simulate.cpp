#include "lfcm/simulate.hpp"

#include "lfcm/errors.hpp"
#include "lfcm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lfcm {

namespace {

constexpr double kMinCalibrationVariance = 1e-12;

Eigen::VectorXd standard_normals(Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < out.size(); ++r) out(r) = normal(rng);
    return out;
}

double sample_variance(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

double initial_weight(const GeneratorConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> magnitude(cfg.weight_min, cfg.weight_max);
    std::bernoulli_distribution negative(0.5);
    const double w = magnitude(rng);
    return negative(rng) ? -w : w;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (num_latent < 1) throw InvalidData("num_latent must be at least 1");
    if (!(latent_edge_prob >= 0.0 && latent_edge_prob <= 1.0)) throw InvalidData("latent_edge_prob must lie in [0, 1]");
    if (children_min < 3) throw InvalidData("every latent needs at least 3 children");
    if (children_max < children_min) throw InvalidData("children range is empty");
    if (!(weight_min > 0.0 && weight_max >= weight_min)) throw InvalidData("weight magnitudes must satisfy 0 < min <= max");
    if (calibration_samples < 2) throw InvalidData("calibration needs at least 2 samples");
    if (!(root_noise_var > 0.0 && parented_noise_var > 0.0)) throw InvalidData("noise variances must be positive");
}

LinearScm::LinearScm(Dag graph, std::map<Edge, double> weights, std::vector<double> noise_var, Index num_latent,
                     std::vector<std::string> node_names)
    : graph_(std::move(graph)), weights_(std::move(weights)), noise_var_(std::move(noise_var)),
      num_latent_(num_latent), names_(std::move(node_names)) {
    const Index n = graph_.node_count();
    if (noise_var_.size() != n) throw ShapeError("noise_var must have one entry per node");
    if (num_latent_ > n) throw ShapeError("more latent nodes than nodes");
    for (double v : noise_var_)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidData("noise variances must be positive and finite");
    if (weights_.size() != graph_.edges().size()) throw ShapeError("weights must cover exactly the graph's edges");
    for (const auto& [edge, w] : weights_) {
        if (!graph_.has_edge(edge.first, edge.second)) throw ShapeError("weight given for a non-edge");
        if (!std::isfinite(w)) throw InvalidData("non-finite edge weight");
    }
    if (names_.empty()) {
        for (Index v = 0; v < n; ++v)
            names_.push_back(v < num_latent_ ? "L" + std::to_string(v) : "X" + std::to_string(v - num_latent_));
    }
    if (names_.size() != n) throw ShapeError("node_names must have one entry per node");
}

std::vector<std::string> LinearScm::observed_names() const {
    return {names_.begin() + static_cast<std::ptrdiff_t>(num_latent_), names_.end()};
}

Lfcm random_lfcm(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng rng = make_rng(cfg.seed, {kTopology});
    const Index k = cfg.num_latent;

    // Skeleton: a random latent order, each forward pair kept independently.
    std::vector<Index> order(k);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution keep(cfg.latent_edge_prob);
    std::set<Edge> skeleton;
    for (Index a = 0; a < k; ++a)
        for (Index b = a + 1; b < k; ++b)
            if (keep(rng)) skeleton.insert({order[a], order[b]});

    std::uniform_int_distribution<Index> child_count(cfg.children_min, cfg.children_max);
    std::vector<Index> cluster_of;
    std::vector<IndexList> children(k);
    for (Index l = 0; l < k; ++l) {
        const Index c = child_count(rng);
        for (Index x = 0; x < c; ++x) {
            children[l].push_back(cluster_of.size());
            cluster_of.push_back(l);
        }
    }

    std::set<Edge> obs_to_latent;
    for (const auto& [from, to] : skeleton) {
        std::uniform_int_distribution<Index> parent_count(2, children[from].size());
        const Index d = parent_count(rng);
        IndexList pool = children[from];
        std::shuffle(pool.begin(), pool.end(), rng);
        for (Index s = 0; s < d; ++s) obs_to_latent.insert({pool[s], to});
    }
    return Lfcm(k, std::move(cluster_of), std::move(obs_to_latent));
}

LinearScm parameterize(const Lfcm& g, const GeneratorConfig& cfg) {
    cfg.validate();
    const Dag dag = g.full_dag();
    const Index nodes = dag.node_count();
    const Index b = cfg.calibration_samples;

    std::map<Edge, double> weights;
    std::vector<double> noise(nodes, cfg.root_noise_var);
    // Calibration draws of every node parameterised so far.
    Eigen::MatrixXd calib(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(nodes));

    for (Index v : dag.topological_order()) {
        Rng noise_rng = make_rng(cfg.seed, {kCalibration, v});
        const auto& parents = dag.parents(v);
        const auto col = static_cast<Eigen::Index>(v);
        if (parents.empty()) {
            calib.col(col) = std::sqrt(cfg.root_noise_var) * standard_normals(b, noise_rng);
            continue;
        }
        Rng weight_rng = make_rng(cfg.seed, {kWeights, v});
        std::vector<double> initial(parents.size());
        Eigen::VectorXd contribution;
        double variance = 0.0;
        for (int attempt = 0; attempt < 2; ++attempt) {
            contribution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b));
            for (std::size_t q = 0; q < parents.size(); ++q) {
                initial[q] = initial_weight(cfg, weight_rng);
                contribution += initial[q] * calib.col(static_cast<Eigen::Index>(parents[q]));
            }
            variance = sample_variance(contribution);
            if (variance > kMinCalibrationVariance) break;
        }
        if (!(variance > kMinCalibrationVariance))
            throw DegenerateCalibration("parental contribution of node " + std::to_string(v) + " has no variance");
        const double scale = 1.0 / std::sqrt(2.0 * variance);
        for (std::size_t q = 0; q < parents.size(); ++q) weights[{parents[q], v}] = scale * initial[q];
        noise[v] = cfg.parented_noise_var;
        calib.col(col) = scale * contribution + std::sqrt(noise[v]) * standard_normals(b, noise_rng);
    }

    std::vector<std::string> names;
    for (Index l = 0; l < g.num_latent(); ++l) names.push_back("L" + std::to_string(l));
    for (const auto& n : g.observed_names()) names.push_back(n);
    return LinearScm(dag, std::move(weights), std::move(noise), g.num_latent(), std::move(names));
}

Eigen::MatrixXd sample_full(const LinearScm& scm, Index n, std::uint64_t seed) {
    if (n < 1) throw InvalidData("sample size must be at least 1");
    const Dag& dag = scm.graph();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dag.node_count()));
    for (Index v : dag.topological_order()) {
        Rng rng = make_rng(seed, {kNoise, v});
        Eigen::VectorXd col = std::sqrt(scm.noise_var()[v]) * standard_normals(n, rng);
        for (Index p : dag.parents(v)) col += scm.weights().at({p, v}) * out.col(static_cast<Eigen::Index>(p));
        out.col(static_cast<Eigen::Index>(v)) = col;
    }
    return out;
}

DataMatrix sample_data(const LinearScm& scm, Index n, std::uint64_t seed) {
    Eigen::MatrixXd full = sample_full(scm, n, seed);
    const auto k = static_cast<Eigen::Index>(scm.num_latent());
    Eigen::MatrixXd observed = full.rightCols(full.cols() - k);
    return DataMatrix(std::move(observed), scm.observed_names());
}

Eigen::MatrixXd full_population_covariance(const LinearScm& scm) {
    const auto n = static_cast<Eigen::Index>(scm.num_nodes());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [edge, w] : scm.weights())
        a(static_cast<Eigen::Index>(edge.second), static_cast<Eigen::Index>(edge.first)) = w;
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(n, n) - a).fullPivLu().inverse();
    Eigen::VectorXd d(n);
    for (Eigen::Index v = 0; v < n; ++v) d(v) = scm.noise_var()[static_cast<std::size_t>(v)];
    Eigen::MatrixXd sigma = inv * d.asDiagonal() * inv.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

CovarianceSource population_covariance(const LinearScm& scm) {
    const Eigen::MatrixXd full = full_population_covariance(scm);
    const auto k = static_cast<Eigen::Index>(scm.num_latent());
    return CovarianceSource::population(full.bottomRightCorner(full.rows() - k, full.cols() - k));
}

}  // namespace lfcm
