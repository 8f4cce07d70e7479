#include "lfcm/errors.hpp"
#include "lfcm/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace lfcm;

namespace {

CovarianceSource cov_of(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return CovarianceSource::population(m);
}

}  // namespace

TEST_CASE("sample covariance of two points uses divisor n-1") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 2.0;
    const auto cov = sample_covariance(DataMatrix(x));
    CHECK(cov(0, 0) == doctest::Approx(2.0));
    CHECK(cov.n_eff() == 2);
}

TEST_CASE("constant column has zero variance") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    CHECK(sample_covariance(DataMatrix(x))(1, 1) == 0.0);
}

TEST_CASE("sample covariance matches the double-loop oracle") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 2, 2, 4, 3, 6, 4, 8;
    const auto cov = sample_covariance(DataMatrix(x));
    const Eigen::MatrixXd expected = testing::covariance_by_loops(x);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(cov(a, b) == doctest::Approx(expected(a, b)).epsilon(1e-14));
    CHECK(cov(0, 1) == doctest::Approx(2.0 * cov(0, 0)));
    // 1,2,3,4 has variance 5/3.
    CHECK(cov(0, 0) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("sample covariance errors") {
    Eigen::MatrixXd one(1, 3);
    one << 1, 2, 3;
    CHECK_THROWS_AS(sample_covariance(DataMatrix(one)), InsufficientSamples);
    Eigen::MatrixXd bad(2, 1);
    bad << 1.0, std::nan("");
    CHECK_THROWS_AS(DataMatrix{bad}, InvalidData);
    CHECK_THROWS_AS(DataMatrix(Eigen::MatrixXd::Zero(2, 2), {"a", "a"}), InvalidData);
}

TEST_CASE("sample covariance is symmetric and positive semidefinite") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + trial % 7, p = 2 + trial % 9;
        Eigen::MatrixXd x(n, p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c) x(r, c) = normal(rng) * (1 + c);
        const auto cov = sample_covariance(DataMatrix(x));
        CHECK(cov.sigma() == cov.sigma().transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.sigma());
        CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("submatrix determinants") {
    const auto id = CovarianceSource::population(Eigen::MatrixXd::Identity(4, 4));
    const IndexList r01{0, 1}, c23{2, 3};
    CHECK(submatrix_det(id, r01, c23) == 0.0);

    Eigen::Vector4d a(1, 2, 3, 4);
    const auto rank1 = CovarianceSource::population(a * a.transpose());
    CHECK(submatrix_det(rank1, r01, c23) == 0.0);

    const auto s = cov_of({{2, 1, 0.5}, {1, 2, 1}, {0.5, 1, 2}});
    const IndexList c02{0, 2}, c12{1, 2};
    CHECK(submatrix_det(s, r01, c02) == doctest::Approx(1.5));
    CHECK(submatrix_det(s, r01, c12) == 0.0);
}

TEST_CASE("3x3 and 4x4 cofactor determinants agree with LU") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd l(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) l(r, c) = normal(rng);
        const auto cov = CovarianceSource::population(l * l.transpose());
        for (std::size_t k : {std::size_t{3}, std::size_t{4}}) {
            IndexList rows{0, 2, 4, 5}, cols{1, 3, 4, 0};
            rows.resize(k);
            cols.resize(k);
            Eigen::MatrixXd sub(k, k);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b) sub(a, b) = cov(rows[a], cols[b]);
            CHECK(submatrix_det(cov, rows, cols) == doctest::Approx(sub.partialPivLu().determinant()).epsilon(1e-9));
        }
    }
}

TEST_CASE("2x2 minors equal the explicit tetrad formula") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd l(5, 5);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) l(r, c) = normal(rng);
    const auto cov = CovarianceSource::population(l * l.transpose());
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            for (Index u = 0; u < 5; ++u)
                for (Index v = 0; v < 5; ++v) {
                    const IndexList rows{i, j}, cols{u, v};
                    CHECK(submatrix_det(cov, rows, cols) == cov(i, u) * cov(j, v) - cov(i, v) * cov(j, u));
                }
}

TEST_CASE("submatrix_det errors") {
    const auto id = CovarianceSource::population(Eigen::MatrixXd::Identity(3, 3));
    const IndexList two{0, 1}, three{0, 1, 2}, out{0, 7};
    CHECK_THROWS_AS(submatrix_det(id, two, three), ShapeError);
    CHECK_THROWS_AS(submatrix_det(id, two, out), IndexError);
    const IndexList five{0, 1, 2, 0, 1};
    CHECK_THROWS_AS(submatrix_det(id, five, five), ShapeError);
}

TEST_CASE("partial correlation examples") {
    const auto id = CovarianceSource::population(Eigen::MatrixXd::Identity(4, 4));
    CHECK(partial_correlation(id, 0, 3, {}) == 0.0);

    // X -> Z -> Y with unit weights and noises: Var X = 1, Var Z = 2, Var Y = 3.
    const auto chain = cov_of({{1, 1, 1}, {1, 2, 2}, {1, 2, 3}});
    const IndexList z{1};
    CHECK(partial_correlation(chain, 0, 2, z) == doctest::Approx(0.0).epsilon(1e-12));

    const auto s = cov_of({{1, 0.6, 0.4}, {0.6, 1, 0.5}, {0.4, 0.5, 1}});
    const double expected = (0.6 - 0.4 * 0.5) / std::sqrt((1 - 0.16) * (1 - 0.25));
    const IndexList c2{2};
    CHECK(partial_correlation(s, 0, 1, c2) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.50395).epsilon(1e-5));
}

TEST_CASE("partial correlation is exactly symmetric in its two variables") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd l(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) l(r, c) = normal(rng);
        const auto cov = CovarianceSource::population(l * l.transpose() + Eigen::MatrixXd::Identity(6, 6));
        const IndexList cond{1, 3, 5};
        const double a = partial_correlation(cov, 0, 4, cond);
        CHECK(a == partial_correlation(cov, 4, 0, cond));
        CHECK(a >= -1.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("partial correlation rejects a singular conditioning set") {
    Eigen::Vector3d a(1, 1, 1);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
    s.block(1, 1, 3, 3) = a * a.transpose();
    const auto cov = CovarianceSource::population(s);
    const IndexList cond{2, 3};
    CHECK_THROWS_AS(partial_correlation(cov, 0, 1, cond), SingularMatrix);
    const IndexList self{0};
    CHECK_THROWS_AS(partial_correlation(cov, 0, 1, self), IndexError);
}

TEST_CASE("normal tail matches quadrature") {
    CHECK(std_normal_two_tailed_p(0.0) == 1.0);
    CHECK(std::abs(std_normal_two_tailed_p(1.959964) - 0.05) < 1e-6);
    CHECK(std::abs(std_normal_two_tailed_p(3.0) - 0.0026998) < 1e-6);
    for (double z : {0.1, 0.5, 1.0, 1.959964, 2.5, 3.0, 4.0, 5.0}) {
        CHECK(std::abs(std_normal_two_tailed_p(z) - testing::two_tailed_p_by_quadrature(z)) < 1e-10);
        CHECK(std_normal_two_tailed_p(-z) == std_normal_two_tailed_p(z));
    }
}

TEST_CASE("normal tail is monotone in |z|") {
    double prev = 1.0;
    for (double z = 0.0; z < 40.0; z += 0.01) {
        const double p = std_normal_two_tailed_p(z);
        CHECK(p <= prev);
        prev = p;
    }
}
