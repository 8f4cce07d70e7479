#include "lfcm/linalg.hpp"

#include "lfcm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace lfcm {

namespace {

constexpr double kMaxConditionNumber = 1e12;

std::vector<std::string> default_names(Eigen::Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index c = 0; c < p; ++c) names.push_back("X" + std::to_string(c));
    return names;
}

void check_index(const CovarianceSource& cov, Index k) {
    if (k >= cov.dim())
        throw IndexError("index " + std::to_string(k) + " out of range for " + std::to_string(cov.dim()) + " variables");
}

double det3(const std::array<std::array<double, 4>, 4>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names)
    : values_(std::move(values)), names_(std::move(column_names)) {
    if (values_.rows() < 1 || values_.cols() < 1) throw ShapeError("data matrix must have at least one row and one column");
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
        throw ShapeError("expected " + std::to_string(values_.cols()) + " column names, got " + std::to_string(names_.size()));
    if (!values_.allFinite()) throw InvalidData("data matrix contains non-finite entries");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second) throw InvalidData("duplicate column name '" + n + "'");
}

DataMatrix::DataMatrix(Eigen::MatrixXd values) : DataMatrix(values, default_names(values.cols())) {}

Index DataMatrix::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw IndexError("no column named '" + name + "'");
    return static_cast<Index>(it - names_.begin());
}

CovarianceSource::CovarianceSource(Eigen::MatrixXd sigma, std::optional<std::int64_t> n_eff)
    : sigma_(std::move(sigma)), n_eff_(n_eff) {
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) throw ShapeError("covariance must be square and non-empty");
    if (!sigma_.allFinite()) throw InvalidData("covariance contains non-finite entries");
    if (n_eff_ && *n_eff_ < 1) throw InvalidData("sample size must be positive");
    const double scale = std::max(sigma_.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index r = 0; r < sigma_.rows(); ++r) {
        if (sigma_(r, r) < 0.0) throw InvalidData("covariance has a negative diagonal entry");
        for (Eigen::Index c = r + 1; c < sigma_.cols(); ++c)
            if (std::abs(sigma_(r, c) - sigma_(c, r)) > 1e-12 * scale) throw InvalidData("covariance is not symmetric");
    }
}

CovarianceSource sample_covariance(const DataMatrix& data) {
    const auto& x = data.values();
    const Eigen::Index n = x.rows();
    if (n < 2) throw InsufficientSamples("sample covariance needs at least 2 rows, got " + std::to_string(n));
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(n - 1);
    // Exact symmetry.
    s = (0.5 * (s + s.transpose())).eval();
    return CovarianceSource(std::move(s), static_cast<std::int64_t>(n));
}

double det2(double a00, double a01, double a10, double a11) { return a00 * a11 - a01 * a10; }

double det4(const std::array<std::array<double, 4>, 4>& m) {
    // Laplace expansion along the first two rows.
    const double s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    const double s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    const double s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    const double s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    const double s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    const double s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    const double c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    const double c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    const double c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    const double c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    const double c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    const double c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

double submatrix_det(const CovarianceSource& cov, std::span<const Index> rows, std::span<const Index> cols) {
    if (rows.size() != cols.size()) throw ShapeError("submatrix_det needs as many rows as columns");
    if (rows.empty() || rows.size() > 4) throw ShapeError("submatrix_det supports sizes 1 to 4");
    for (Index r : rows) check_index(cov, r);
    for (Index c : cols) check_index(cov, c);

    std::array<std::array<double, 4>, 4> m{};
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) m[a][b] = cov(rows[a], cols[b]);

    switch (rows.size()) {
        case 1: return m[0][0];
        case 2: return det2(m[0][0], m[0][1], m[1][0], m[1][1]);
        case 3: return det3(m);
        default: return det4(m);
    }
}

double partial_correlation(const CovarianceSource& cov, Index i, Index j, std::span<const Index> cond) {
    check_index(cov, i);
    check_index(cov, j);
    if (i == j) throw IndexError("partial correlation needs two distinct variables");
    for (Index c : cond) {
        check_index(cov, c);
        if (c == i || c == j) throw IndexError("conditioning set contains one of the tested variables");
    }

    // Symmetric in (i, j) bit for bit.
    if (j < i) std::swap(i, j);

    const Eigen::Index m = static_cast<Eigen::Index>(cond.size()) + 2;
    Eigen::MatrixXd sub(m, m);
    auto at = [&](Eigen::Index a) { return a == 0 ? i : a == 1 ? j : cond[static_cast<std::size_t>(a - 2)]; };
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = cov(at(a), at(b));

    double rho = 0.0;
    if (cond.empty()) {
        const double denom = sub(0, 0) * sub(1, 1);
        if (!(denom > 0.0)) throw SingularMatrix("zero variance in partial correlation");
        rho = sub(0, 1) / std::sqrt(denom);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
        if (eig.info() != Eigen::Success) throw SingularMatrix("eigendecomposition failed");
        const Eigen::VectorXd& lambda = eig.eigenvalues();
        const double lo = lambda.minCoeff();
        const double hi = lambda.maxCoeff();
        if (!(lo > 0.0) || hi / lo > kMaxConditionNumber)
            throw SingularMatrix("conditioning submatrix is singular (condition number above 1e12)");
        // Only the top-left 2x2 block of the precision matrix is needed.
        const Eigen::MatrixXd& v = eig.eigenvectors();
        const Eigen::ArrayXd inv = lambda.array().inverse();
        const double p00 = (v.row(0).array().square() * inv.transpose()).sum();
        const double p11 = (v.row(1).array().square() * inv.transpose()).sum();
        const double p01 = (v.row(0).array() * v.row(1).array() * inv.transpose()).sum();
        rho = -p01 / std::sqrt(p00 * p11);
    }
    return std::clamp(rho, -1.0, 1.0);
}

double std_normal_two_tailed_p(double z) {
    return std::clamp(std::erfc(std::abs(z) / std::numbers::sqrt2), 0.0, 1.0);
}

}  // namespace lfcm
