#include "../tools/commands.hpp"
#include "lfcm/discovery.hpp"
#include "lfcm/errors.hpp"
#include "lfcm/eval.hpp"
#include "lfcm/io.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace lfcm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("lfcm_test_" + tag + "_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

}  // namespace

TEST_CASE("simulate writes deterministic files") {
    TempDir a("sim_a"), b("sim_b");
    for (const auto* dir : {&a, &b}) {
        const auto r = run({"simulate", "--latents", "10", "--edge-prob", "0.5", "--n", "200", "--seed", "7", "--out",
                            dir->path.string()});
        REQUIRE(r.code == 0);
    }
    for (const auto& name : {cli::scm_file_name(0), cli::truth_file_name(0), cli::data_file_name(0, 200)}) {
        CHECK(fs::exists(a.path / name));
        CHECK(io::read_text(a.path / name) == io::read_text(b.path / name));
    }
    CHECK(cli::data_file_name(3, 200) == "graph003_n200.csv");
    const DataMatrix data = io::read_csv_file(a.path / cli::data_file_name(0, 200));
    CHECK(data.rows() == 200);
    const Lfcm truth = io::lfcm_from_json(io::read_json_file(a.path / cli::truth_file_name(0)));
    CHECK(truth.num_latent() == 10);
    CHECK(truth.num_observed() == data.cols());
}

TEST_CASE("simulate with one latent and several graphs") {
    TempDir dir("sim_one");
    REQUIRE(run({"simulate", "--latents", "1", "--graphs", "3", "--n", "50", "100", "--seed", "1", "--out",
                 dir.path.string()})
                .code == 0);
    const Lfcm g = io::lfcm_from_json(io::read_json_file(dir.path / cli::truth_file_name(2)));
    CHECK(g.num_latent() == 1);
    CHECK(g.obs_to_latent().empty());
    CHECK(fs::exists(dir.path / cli::data_file_name(2, 100)));
}

TEST_CASE("seed is mandatory and bad input exits with 2") {
    TempDir dir("bad");
    const auto r = run({"simulate", "--out", dir.path.string()});
    CHECK(r.code == cli::kInputError);
    CHECK(run({"discover", (dir.path / "missing.csv").string(), "--out", (dir.path / "x.json").string()}).code ==
          cli::kInputError);
    io::write_text(dir.path / "bad.csv", "a,b\n1\n");
    CHECK(run({"discover", (dir.path / "bad.csv").string(), "--out", (dir.path / "x.json").string()}).code ==
          cli::kInputError);
    CHECK(run({"frobnicate"}).code == cli::kInputError);
    CHECK(run({"simulate", "--seed", "1", "--latents", "0", "--out", dir.path.string()}).code == cli::kInputError);
}

TEST_CASE("discover matches the library and is byte-stable") {
    TempDir dir("disc");
    REQUIRE(run({"simulate", "--latents", "4", "--n", "100000", "--seed", "11", "--out", dir.path.string()}).code == 0);
    const auto data = (dir.path / cli::data_file_name(0, 100000)).string();
    const auto est = (dir.path / "est.json").string(), est2 = (dir.path / "est2.json").string();
    const auto trace = (dir.path / "trace.json").string();
    REQUIRE(run({"discover", data, "--out", est, "--trace", trace, "--alpha-vt", "0.05"}).code == 0);
    REQUIRE(run({"discover", data, "--out", est2, "--alpha-vt", "0.05"}).code == 0);
    CHECK(io::read_text(est) == io::read_text(est2));
    CHECK(io::read_json_file(trace).contains("rounds"));

    DiscoveryConfig cfg;
    cfg.alpha_vt = 0.05;
    const Lfcm direct = estimate_lfcm(io::read_csv_file(data), cfg).first;
    const Lfcm learned = io::lfcm_from_json(io::read_json_file(est));
    CHECK(learned == direct);

    const Lfcm truth = io::lfcm_from_json(io::read_json_file(dir.path / cli::truth_file_name(0)));
    const Confusion c = cluster_pair_confusion(truth.clusters(), learned.clusters());
    const auto r = run({"evaluate", (dir.path / cli::truth_file_name(0)).string(), est});
    CHECK(r.code == 0);
    const std::string row = "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.fn) +
                            "," + std::to_string(c.tn) + ",";
    CHECK(r.out.find(row) != std::string::npos);
}

TEST_CASE("discover at alpha 1 rejects every pair") {
    TempDir dir("alpha1");
    REQUIRE(run({"simulate", "--latents", "3", "--n", "300", "--seed", "2", "--out", dir.path.string()}).code == 0);
    const auto est = (dir.path / "est.json").string(), trace = (dir.path / "trace.json").string();
    REQUIRE(run({"discover", (dir.path / cli::data_file_name(0, 300)).string(), "--out", est, "--trace", trace,
                 "--alpha-vt", "1.0"})
                .code == 0);
    const Lfcm g = io::lfcm_from_json(io::read_json_file(est));
    CHECK(g.num_latent() == 1);
    const auto t = io::read_json_file(trace);
    REQUIRE(t.at("rounds").size() == 1);
    CHECK(t.at("rounds")[0].at("accepted") == false);
}

TEST_CASE("statistical precondition failures exit with 3") {
    TempDir dir("stat");
    io::write_text(dir.path / "tiny.csv", "a,b,c,d,e\n1,2,3,4,5\n2,1,4,3,6\n3,3,1,2,7\n");
    const auto r = run({"discover", (dir.path / "tiny.csv").string(), "--out", (dir.path / "x.json").string()});
    CHECK(r.code == cli::kStatisticalError);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("evaluate rows") {
    TempDir dir("eval");
    const Lfcm truth(2, {0, 0, 0, 1, 1, 1}, {});
    const Lfcm split(3, {0, 0, 1, 1, 2, 2}, {});
    const Lfcm singles(6, {0, 1, 2, 3, 4, 5}, {});
    io::write_json_file(dir.path / "t.json", io::lfcm_to_json(truth));
    io::write_json_file(dir.path / "s.json", io::lfcm_to_json(split));
    io::write_json_file(dir.path / "u.json", io::lfcm_to_json(singles));
    const auto t = (dir.path / "t.json").string();

    const auto same = run({"evaluate", t, t, "--alpha", "0.1", "--seed", "3"});
    REQUIRE(same.code == 0);
    CHECK(same.out.find("0.1,3,6,0,0,9,0,1,cluster_pairs\n") != std::string::npos);

    const auto hand = run({"evaluate", t, (dir.path / "s.json").string()});
    CHECK(hand.out.find("NA,NA,2,1,4,8,") != std::string::npos);

    const auto single = run({"evaluate", t, (dir.path / "u.json").string()});
    CHECK(single.out.find("NA,NA,0,0,6,9,0,0,cluster_pairs") != std::string::npos);

    const Lfcm other(2, {0, 0, 0, 1, 1, 1}, {}, {"a", "b", "c", "d", "e", "f"});
    io::write_json_file(dir.path / "o.json", io::lfcm_to_json(other));
    CHECK(run({"evaluate", t, (dir.path / "o.json").string()}).code == cli::kInputError);
}

TEST_CASE("benchmark rows, ordering and determinism") {
    TempDir dir("bench");
    const auto a = (dir.path / "a.csv").string(), b = (dir.path / "b.csv").string();
    REQUIRE(run({"benchmark", "--graphs", "3", "--latents", "3", "--n", "200", "--alphas", "0.3", "0.1", "--seed",
                 "5", "--jobs", "1", "--out", a})
                .code == 0);
    REQUIRE(run({"benchmark", "--graphs", "3", "--latents", "3", "--n", "200", "--alphas", "0.3", "0.1", "--seed",
                 "5", "--jobs", "3", "--out", b})
                .code == 0);
    CHECK(io::read_text(a) == io::read_text(b));
    const auto rows = io::parse_metrics_csv(io::read_text(a));
    CHECK(rows.size() == 3 * 2 * 5);
    CHECK(rows[0].alpha == 0.1);
    CHECK(rows[0].method == "lfcm");
    CHECK(rows[1].method == "random");
    CHECK(rows[4].method == "oracle");

    const auto one = run({"benchmark", "--graphs", "1", "--latents", "2", "--n", "100", "--alphas", "0.2", "--seed",
                          "1"});
    CHECK(one.code == 0);
    CHECK(io::parse_metrics_csv(one.out).size() >= 4);
    CHECK(run({"benchmark", "--alphas", "1.5", "--seed", "1"}).code == cli::kInputError);
}

TEST_CASE("preprocess step parsing") {
    const auto steps = cli::parse_steps("regress-out PKA; remove-effect Mek from Raf given PKC; drop PIP3 PKC");
    REQUIRE(steps.size() == 3);
    CHECK(steps[0].kind == cli::PreprocessStep::Kind::RegressOut);
    CHECK(steps[1].columns == std::vector<std::string>{"Mek", "Raf", "PKC"});
    CHECK(steps[2].columns == std::vector<std::string>{"PIP3", "PKC"});
    CHECK(cli::parse_steps("remove-effect a from b")[0].columns == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(cli::parse_steps("regress-out"), ParseError);
    CHECK_THROWS_AS(cli::parse_steps("remove-effect a b"), ParseError);
    CHECK_THROWS_AS(cli::parse_steps("remove-effect a from b given"), ParseError);
    CHECK_THROWS_AS(cli::parse_steps("shuffle a"), ParseError);
}

TEST_CASE("regress-out leaves uncorrelated columns alone") {
    // Column c is exactly orthogonal to the centred a and b.
    Eigen::MatrixXd v(4, 3);
    v << 1, 2, 1, 2, 1, -1, 3, 5, -1, 4, 4, 1;
    const DataMatrix data(v, {"a", "b", "c"});
    const DataMatrix out = cli::apply_steps(data, cli::parse_steps("regress-out c"));
    CHECK(out.column_names() == std::vector<std::string>{"a", "b"});
    CHECK((out.values() - v.leftCols(2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("regress-out leaves residuals orthogonal to the removed column") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd v(500, 3);
    for (int r = 0; r < 500; ++r) {
        const double z = normal(rng);
        v(r, 0) = z + normal(rng);
        v(r, 1) = -2 * z + normal(rng);
        v(r, 2) = z;
    }
    const DataMatrix out = cli::apply_steps(DataMatrix(v, {"a", "b", "z"}), cli::parse_steps("regress-out z"));
    CHECK(std::abs(correlation(out.values().col(0), v.col(2))) < 1e-10);
    CHECK(std::abs(correlation(out.values().col(1), v.col(2))) < 1e-10);
}

TEST_CASE("remove-effect kills the direct effect") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    const int n = 10000;
    Eigen::MatrixXd v(n, 3);
    for (int r = 0; r < n; ++r) {
        v(r, 1) = normal(rng);
        v(r, 2) = normal(rng);
        v(r, 0) = 2 * v(r, 1) + 0.5 * v(r, 2) + normal(rng) + 10;
    }
    const DataMatrix data(v, {"child", "parent", "other"});
    const DataMatrix out = cli::apply_steps(data, cli::parse_steps("remove-effect child from parent given other"));
    CHECK(std::abs(correlation(out.values().col(0), v.col(1))) < 0.05);
    CHECK(out.values().col(1) == v.col(1));
    CHECK(out.values().col(2) == v.col(2));

    Eigen::MatrixXd collinear = v;
    collinear.col(2) = 3 * v.col(1);
    CHECK_THROWS_AS(cli::apply_steps(DataMatrix(collinear, {"child", "parent", "other"}),
                                     cli::parse_steps("remove-effect child from parent given other")),
                    SingularMatrix);
    CHECK_THROWS_AS(cli::apply_steps(data, cli::parse_steps("drop nothere")), IndexError);
}

TEST_CASE("preprocess command runs the full recipe") {
    TempDir dir("prep");
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd v(300, 5);
    for (int r = 0; r < 300; ++r)
        for (int c = 0; c < 5; ++c) v(r, c) = normal(rng) + (c > 0 ? 0.5 * v(r, c - 1) : 0.0);
    io::write_csv_file(dir.path / "in.csv", DataMatrix(v, {"PKA", "Raf", "Mek", "PKC", "PIP3"}));
    const auto out = (dir.path / "out.csv").string();
    const auto r = run({"preprocess", (dir.path / "in.csv").string(), "--out", out, "--steps",
                        "regress-out PKA; remove-effect Mek from Raf given PKC; drop PIP3 PKC"});
    REQUIRE(r.code == 0);
    CHECK(io::read_csv_file(out).column_names() == std::vector<std::string>{"Raf", "Mek"});
    CHECK(run({"preprocess", (dir.path / "in.csv").string(), "--out", out, "--steps", "drop Erk"}).code ==
          cli::kInputError);
}
