// Dense linear-algebra aliases and small numerical helpers shared by every module.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcmoment {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A finite-difference stencil would leave the valid domain of a chart.
class ChartBoundaryError : public Error {
public:
    using Error::Error;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

/// Singular values below rel_tol * (largest singular value) count as zero.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol) {
    if (m.size() == 0) return 0;
    using Plain = typename Derived::PlainObject;
    Eigen::JacobiSVD<Plain> svd(m.eval());
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++rank;
    return rank;
}

inline Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

inline bool is_antisymmetric(const Mat& m, double tol) {
    return m.rows() == m.cols() && max_abs(m + m.transpose()) <= tol * std::max(1.0, max_abs(m));
}

inline bool is_symmetric(const Mat& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.transpose()) <= tol * std::max(1.0, max_abs(m));
}

inline bool is_spd(const Mat& m) {
    if (!is_symmetric(m, 1e-12)) return false;
    Eigen::LLT<Mat> llt(m);
    return llt.info() == Eigen::Success;
}

/// Median of a copy of the values; 0 for an empty input.
inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

inline Vec unit(Eigen::Index n, Eigen::Index i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    return e;
}

}  // namespace gcmoment
