#include "commands.hpp"

#include "lfcm/errors.hpp"
#include "lfcm/eval.hpp"
#include "lfcm/io.hpp"
#include "lfcm/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lfcm::cli {

namespace fs = std::filesystem;

namespace {

std::string zero_padded(Index v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

void check_alpha_open(double a) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidData("significance levels must lie in (0, 1)");
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

void ensure_parent(const fs::path& file) {
    if (file.has_parent_path()) ensure_directory(file.parent_path());
}

Eigen::VectorXd column(const Eigen::MatrixXd& x, Index c) { return x.col(static_cast<Eigen::Index>(c)); }

// Slope of y on x (with intercept); throws SingularMatrix when x is constant.
double simple_slope(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
    const Eigen::VectorXd xc = x.array() - x.mean();
    const double sxx = xc.squaredNorm();
    if (!(sxx > 0.0)) throw SingularMatrix("regressor column is constant");
    return xc.dot(y.array().matrix() - Eigen::VectorXd::Constant(y.size(), y.mean())) / sxx;
}

DataMatrix drop_columns(const DataMatrix& data, const std::vector<std::string>& drop) {
    std::vector<Index> keep;
    for (Index c = 0; c < data.cols(); ++c)
        if (std::find(drop.begin(), drop.end(), data.column_names()[c]) == drop.end()) keep.push_back(c);
    if (keep.empty()) throw InvalidData("preprocessing would remove every column");
    Eigen::MatrixXd values(data.values().rows(), static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        values.col(static_cast<Eigen::Index>(k)) = column(data.values(), keep[k]);
        names.push_back(data.column_names()[keep[k]]);
    }
    return DataMatrix(std::move(values), std::move(names));
}

struct SweepPoint {
    Index graph;
    Index replicate;
};

std::vector<io::MetricsRow> run_point(const BenchmarkOptions& opt, const SweepPoint& point) {
    GeneratorConfig gen = opt.generator;
    gen.seed = graph_seed(opt.generator.seed, point.graph);
    const Lfcm truth = random_lfcm(gen);
    const LinearScm scm = parameterize(truth, gen);
    const std::uint64_t seed = data_seed(gen.seed, opt.n, point.replicate);
    const Eigen::MatrixXd full = sample_full(scm, opt.n, seed);
    const DataMatrix data = sample_data(scm, opt.n, seed);
    const CovarianceSource cov = sample_covariance(data);
    const auto true_clusters = truth.clusters();

    std::vector<io::MetricsRow> rows;
    auto row = [&](double alpha, const Confusion& c, io::MetricKind kind, const char* method) {
        rows.push_back({alpha, gen.seed, c, kind, method});
    };
    for (double alpha : opt.alphas) {
        DiscoveryConfig cfg;
        cfg.alpha_vt = alpha;
        cfg.alpha_ci = alpha;
        auto [stage1, trace] = find_ordered_clusters(cov, cfg);
        const OrderedClustering merged = merge_clusters(cov, stage1, cfg);
        row(alpha, cluster_pair_confusion(true_clusters, merged.clusters), io::MetricKind::ClusterPairs, "lfcm");

        const auto random = random_clustering_baseline(truth.num_observed(), merged.size(),
                                                       derive_seed(gen.seed, {kBaseline, point.replicate}));
        row(alpha, cluster_pair_confusion(true_clusters, random), io::MetricKind::ClusterPairs, "random");

        const IndexList order = latent_ordering(truth);
        auto edges = [&](std::set<Edge> e) { return edge_confusion(truth, with_edges(truth, std::move(e)), order); };
        row(alpha, edges(full_method_edges(cov, truth, alpha)), io::MetricKind::Edges, "lfcm");
        row(alpha, edges(single_child_baseline_edges(cov, truth, alpha)), io::MetricKind::Edges, "single_child");
        row(alpha, edges(oracle_edges(full, truth, alpha)), io::MetricKind::Edges, "oracle");
    }
    return rows;
}

int report_error(std::ostream& err, const std::exception& e, int code) {
    err << "error: " << e.what() << '\n';
    return code;
}

}  // namespace

std::string scm_file_name(Index graph) { return "graph" + zero_padded(graph, 3) + "_scm.json"; }
std::string truth_file_name(Index graph) { return "graph" + zero_padded(graph, 3) + "_lfcm.json"; }
std::string data_file_name(Index graph, Index n) { return "graph" + zero_padded(graph, 3) + "_n" + std::to_string(n) + ".csv"; }

std::uint64_t graph_seed(std::uint64_t master, Index graph) { return derive_seed(master, {graph}); }
std::uint64_t data_seed(std::uint64_t graph_seed, Index n, Index replicate) {
    return derive_seed(graph_seed, {kData, n, replicate});
}

void cmd_simulate(const SimulateOptions& opt) {
    opt.generator.validate();
    if (opt.n.empty()) throw InvalidData("at least one sample size is required");
    for (Index n : opt.n)
        if (n < 1) throw InvalidData("sample sizes must be positive");
    ensure_directory(opt.out_dir);
    for (Index g = 0; g < opt.graphs; ++g) {
        GeneratorConfig gen = opt.generator;
        gen.seed = graph_seed(opt.generator.seed, g);
        const Lfcm truth = random_lfcm(gen);
        const LinearScm scm = parameterize(truth, gen);
        io::write_json_file(opt.out_dir / scm_file_name(g), io::scm_to_json(scm));
        io::write_json_file(opt.out_dir / truth_file_name(g), io::lfcm_to_json(truth));
        for (Index n : opt.n) io::write_csv_file(opt.out_dir / data_file_name(g, n), sample_data(scm, n, data_seed(gen.seed, n)));
    }
}

void cmd_discover(const DiscoverOptions& opt) {
    opt.discovery.validate();
    const DataMatrix data = io::read_csv_file(opt.data);
    const auto [graph, trace] = estimate_lfcm(data, opt.discovery);
    ensure_parent(opt.out);
    io::write_json_file(opt.out, io::lfcm_to_json(graph));
    if (opt.trace) {
        ensure_parent(*opt.trace);
        io::write_json_file(*opt.trace, io::trace_to_json(trace));
    }
}

void cmd_evaluate(const EvaluateOptions& opt, std::ostream& out) {
    const Lfcm truth = io::lfcm_from_json(io::read_json_file(opt.truth));
    const Lfcm est = io::lfcm_from_json(io::read_json_file(opt.estimate));
    if (truth.observed_names() != est.observed_names())
        throw DomainMismatch("truth and estimate are over different observed variables");
    std::vector<io::MetricsRow> rows;
    rows.push_back({opt.alpha, opt.seed, cluster_pair_confusion(truth.clusters(), est.clusters()),
                    io::MetricKind::ClusterPairs, ""});
    rows.push_back({opt.alpha, opt.seed, edge_confusion(truth, est, latent_ordering(truth)), io::MetricKind::Edges, ""});
    const std::string csv = io::metrics_csv(rows);
    if (opt.out) {
        ensure_parent(*opt.out);
        io::write_text(*opt.out, csv);
    } else {
        out << csv;
    }
}

std::size_t cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& log) {
    opt.generator.validate();
    if (opt.alphas.empty()) throw InvalidData("at least one alpha is required");
    for (double a : opt.alphas) check_alpha_open(a);
    if (opt.n < 5) throw InvalidData("benchmark needs n >= 5");
    std::vector<double> alphas = opt.alphas;
    std::sort(alphas.begin(), alphas.end());
    BenchmarkOptions sorted_opt = opt;
    sorted_opt.alphas = alphas;

    std::vector<SweepPoint> points;
    for (Index g = 0; g < opt.graphs; ++g)
        for (Index r = 0; r < opt.replicates; ++r) points.push_back({g, r});

    std::vector<std::vector<io::MetricsRow>> results(points.size());
    std::vector<std::string> failures(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
            try {
                results[k] = run_point(sorted_opt, points[k]);
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<io::MetricsRow> rows;
    std::size_t failed = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!failures[k].empty()) {
            ++failed;
            log << "benchmark point graph=" << points[k].graph << " replicate=" << points[k].replicate
                << " failed: " << failures[k] << '\n';
            continue;
        }
        rows.insert(rows.end(), results[k].begin(), results[k].end());
    }
    const std::string csv = io::metrics_csv(rows, true);
    if (opt.out) {
        ensure_parent(*opt.out);
        io::write_text(*opt.out, csv);
    } else {
        out << csv;
    }
    return failed;
}

std::vector<PreprocessStep> parse_steps(const std::string& text) {
    std::vector<PreprocessStep> steps;
    std::istringstream all(text);
    std::string piece;
    while (std::getline(all, piece, ';')) {
        std::istringstream words(piece);
        std::vector<std::string> w;
        for (std::string s; words >> s;) w.push_back(s);
        if (w.empty()) continue;
        const std::string verb = w.front();
        w.erase(w.begin());
        if (verb == "regress-out") {
            if (w.size() != 1) throw ParseError("regress-out takes exactly one column");
            steps.push_back({PreprocessStep::Kind::RegressOut, w});
        } else if (verb == "remove-effect") {
            // CHILD from PARENT [given OTHER...]
            if (w.size() < 3 || w[1] != "from") throw ParseError("expected 'remove-effect CHILD from PARENT [given COLS...]'");
            std::vector<std::string> cols{w[0], w[2]};
            if (w.size() > 3) {
                if (w[3] != "given" || w.size() == 4) throw ParseError("expected 'given' followed by column names");
                cols.insert(cols.end(), w.begin() + 4, w.end());
            }
            steps.push_back({PreprocessStep::Kind::RemoveEffect, cols});
        } else if (verb == "drop") {
            if (w.empty()) throw ParseError("drop needs at least one column");
            steps.push_back({PreprocessStep::Kind::Drop, w});
        } else {
            throw ParseError("unknown preprocessing step '" + verb + "'");
        }
    }
    return steps;
}

DataMatrix apply_steps(const DataMatrix& input, const std::vector<PreprocessStep>& steps) {
    DataMatrix data = input;
    for (const auto& step : steps) {
        for (const auto& c : step.columns) (void)data.column_index(c);
        switch (step.kind) {
            case PreprocessStep::Kind::RegressOut: {
                const Index target = data.column_index(step.columns[0]);
                Eigen::MatrixXd values = data.values();
                const Eigen::VectorXd x = column(values, target);
                const Eigen::VectorXd xc = x.array() - x.mean();
                for (Index c = 0; c < data.cols(); ++c) {
                    if (c == target) continue;
                    // Residual of the fit on x, column mean kept.
                    values.col(static_cast<Eigen::Index>(c)) -= simple_slope(column(values, c), x) * xc;
                }
                data = drop_columns(DataMatrix(std::move(values), data.column_names()), step.columns);
                break;
            }
            case PreprocessStep::Kind::RemoveEffect: {
                const Index child = data.column_index(step.columns[0]);
                const auto n = static_cast<Eigen::Index>(data.rows());
                Eigen::MatrixXd design(n, static_cast<Eigen::Index>(step.columns.size()));
                design.col(0).setOnes();
                for (std::size_t k = 1; k < step.columns.size(); ++k)
                    design.col(static_cast<Eigen::Index>(k)) = column(data.values(), data.column_index(step.columns[k]));
                const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
                if (qr.rank() < design.cols()) throw SingularMatrix("remove-effect regression is rank deficient");
                const Eigen::VectorXd beta = qr.solve(column(data.values(), child));
                Eigen::MatrixXd values = data.values();
                values.col(static_cast<Eigen::Index>(child)) -= beta(1) * design.col(1);
                data = DataMatrix(std::move(values), data.column_names());
                break;
            }
            case PreprocessStep::Kind::Drop:
                data = drop_columns(data, step.columns);
                break;
        }
    }
    return data;
}

void cmd_preprocess(const PreprocessOptions& opt) {
    const DataMatrix data = io::read_csv_file(opt.data);
    const DataMatrix result = apply_steps(data, opt.steps);
    ensure_parent(opt.out);
    io::write_csv_file(opt.out, result);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent factor causal model discovery"};
    app.require_subcommand(1);

    auto add_generator = [](CLI::App* cmd, GeneratorConfig& g) {
        cmd->add_option("--latents,--num-latent", g.num_latent, "Number of latent nodes")->capture_default_str();
        cmd->add_option("--edge-prob,--latent-edge-prob", g.latent_edge_prob, "Latent edge probability")
            ->capture_default_str();
        cmd->add_option("--children-min", g.children_min, "Fewest children per latent")->capture_default_str();
        cmd->add_option("--children-max", g.children_max, "Most children per latent")->capture_default_str();
        cmd->add_option("--weight-min", g.weight_min, "Smallest initial weight magnitude")->capture_default_str();
        cmd->add_option("--weight-max", g.weight_max, "Largest initial weight magnitude")->capture_default_str();
        cmd->add_option("--calibration-samples", g.calibration_samples, "Draws used to normalise weights")
            ->capture_default_str();
        cmd->add_option("--seed", g.seed, "Master seed")->required();
    };
    auto add_discovery = [](CLI::App* cmd, DiscoveryConfig& d) {
        cmd->add_option("--alpha-vt", d.alpha_vt, "Vanishing-tetrad significance level")->capture_default_str();
        cmd->add_option("--alpha-ci", d.alpha_ci, "Conditional-independence significance level")->capture_default_str();
        cmd->add_option("--min-clique", d.min_clique, "Smallest clique accepted as a cluster")->capture_default_str();
    };

    SimulateOptions sim;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Generate random LFCMs, SCMs and data");
    add_generator(simulate, sim.generator);
    simulate->add_option("--graphs", sim.graphs, "Number of graphs")->capture_default_str();
    simulate->add_option("--n", sim.n, "Sample size(s)")->capture_default_str();
    simulate->add_option("--out", sim_out, "Output directory")->required();

    DiscoverOptions disc;
    std::string disc_data, disc_out, disc_trace;
    auto* discover = app.add_subcommand("discover", "Estimate an LFCM from a data CSV");
    discover->add_option("data", disc_data, "Data CSV")->required();
    discover->add_option("--out", disc_out, "Output LFCM JSON")->required();
    discover->add_option("--trace", disc_trace, "Write the discovery trace JSON here");
    add_discovery(discover, disc.discovery);

    EvaluateOptions eval;
    std::string eval_truth, eval_est, eval_out;
    double eval_alpha = 0.0;
    std::uint64_t eval_seed = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Compare an estimated LFCM with the truth");
    evaluate->add_option("truth", eval_truth, "Ground-truth LFCM JSON")->required();
    evaluate->add_option("estimate", eval_est, "Estimated LFCM JSON")->required();
    evaluate->add_option("--out", eval_out, "Metrics CSV (stdout when omitted)");
    auto* eval_alpha_opt = evaluate->add_option("--alpha", eval_alpha, "Alpha recorded in the rows");
    auto* eval_seed_opt = evaluate->add_option("--seed", eval_seed, "Seed recorded in the rows");

    BenchmarkOptions bench;
    std::string bench_out;
    auto* benchmark = app.add_subcommand("benchmark", "Simulate, discover and evaluate over a sweep");
    add_generator(benchmark, bench.generator);
    benchmark->add_option("--graphs", bench.graphs, "Number of graphs")->capture_default_str();
    benchmark->add_option("--n", bench.n, "Samples per graph")->capture_default_str();
    benchmark->add_option("--alphas", bench.alphas, "Significance levels")->capture_default_str();
    benchmark->add_option("--replicates", bench.replicates, "Data sets per graph")->capture_default_str();
    benchmark->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
    benchmark->add_option("--out", bench_out, "Metrics CSV (stdout when omitted)");

    PreprocessOptions prep;
    std::string prep_data, prep_out;
    std::vector<std::string> prep_steps;
    auto* preprocess = app.add_subcommand("preprocess", "Regress out, remove direct effects, drop columns");
    preprocess->add_option("data", prep_data, "Input CSV")->required();
    preprocess->add_option("--out", prep_out, "Output CSV")->required();
    preprocess->add_option("--steps", prep_steps, "Steps separated by ';' (repeatable)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (simulate->parsed()) {
            sim.out_dir = sim_out;
            cmd_simulate(sim);
        } else if (discover->parsed()) {
            disc.data = disc_data;
            disc.out = disc_out;
            if (!disc_trace.empty()) disc.trace = disc_trace;
            cmd_discover(disc);
        } else if (evaluate->parsed()) {
            eval.truth = eval_truth;
            eval.estimate = eval_est;
            if (!eval_out.empty()) eval.out = eval_out;
            if (eval_alpha_opt->count()) eval.alpha = eval_alpha;
            if (eval_seed_opt->count()) eval.seed = eval_seed;
            cmd_evaluate(eval, out);
        } else if (benchmark->parsed()) {
            if (!bench_out.empty()) bench.out = bench_out;
            if (cmd_benchmark(bench, out, err) > 0) return kPartialFailure;
        } else if (preprocess->parsed()) {
            prep.data = prep_data;
            prep.out = prep_out;
            for (const auto& s : prep_steps) {
                auto parsed = parse_steps(s);
                prep.steps.insert(prep.steps.end(), parsed.begin(), parsed.end());
            }
            cmd_preprocess(prep);
        }
    } catch (const StatisticalError& e) {
        return report_error(err, e, kStatisticalError);
    } catch (const InputError& e) {
        return report_error(err, e, kInputError);
    } catch (const std::exception& e) {
        return report_error(err, e, kInputError);
    }
    return kOk;
}

}  // namespace lfcm::cli
