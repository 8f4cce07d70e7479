#ifndef LFCM_LINALG_HPP
#define LFCM_LINALG_HPP

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lfcm {

using Index = std::size_t;
using IndexList = std::vector<Index>;

// n x p sample matrix, rows are samples.
class DataMatrix {
public:
    DataMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names);
    // Columns named X0..X{p-1}.
    explicit DataMatrix(Eigen::MatrixXd values);

    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& column_names() const { return names_; }
    Index rows() const { return static_cast<Index>(values_.rows()); }
    Index cols() const { return static_cast<Index>(values_.cols()); }

    // Throws IndexError if no column has this name.
    Index column_index(const std::string& name) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

// Covariance matrix plus the sample size it was estimated from. A missing
// sample size marks an exact population covariance.
class CovarianceSource {
public:
    CovarianceSource(Eigen::MatrixXd sigma, std::optional<std::int64_t> n_eff);

    static CovarianceSource population(Eigen::MatrixXd sigma) {
        return CovarianceSource(std::move(sigma), std::nullopt);
    }

    const Eigen::MatrixXd& sigma() const { return sigma_; }
    std::optional<std::int64_t> n_eff() const { return n_eff_; }
    bool is_population() const { return !n_eff_.has_value(); }
    Index dim() const { return static_cast<Index>(sigma_.rows()); }
    double operator()(Index r, Index c) const { return sigma_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)); }

    // Same matrix, different nominal sample size.
    CovarianceSource with_sample_size(std::int64_t n) const { return CovarianceSource(sigma_, n); }

private:
    Eigen::MatrixXd sigma_;
    std::optional<std::int64_t> n_eff_;
};

// Mean-centred covariance with divisor n-1.
CovarianceSource sample_covariance(const DataMatrix& data);

// Determinant of the |rows| x |cols| submatrix, sizes 1..4, by cofactor expansion.
double submatrix_det(const CovarianceSource& cov, std::span<const Index> rows, std::span<const Index> cols);

// Partial correlation of i and j given cond, read off the inverse of the
// covariance submatrix over {i, j} u cond.
double partial_correlation(const CovarianceSource& cov, Index i, Index j, std::span<const Index> cond);

// 2 Q(|z|) for the standard normal tail Q.
double std_normal_two_tailed_p(double z);

// Explicit small determinants; exposed for the tetrad variance formula.
double det2(double a00, double a01, double a10, double a11);
double det4(const std::array<std::array<double, 4>, 4>& m);

}  // namespace lfcm

#endif  // LFCM_LINALG_HPP
