// Linear algebra of generalized complex structures on one fiber V + V*.
//
// Elements are stacked as (tangent part, cotangent part), so every
// endomorphism is a 2d x 2d block matrix read in that order. A 2-form
// enters the block matrices through its flat map X -> i_X w; use
// gcmoment::flat() to convert a component matrix w_ij = w(e_i, e_j).
#pragma once

#include "gcmoment/linalg.hpp"

#include <utility>

namespace gcmoment {

/// An element X + xi of a fiber of T + T*.
struct SplitElement {
    Vec vec;  // tangent part X
    Vec cov;  // cotangent part xi

    SplitElement() = default;
    SplitElement(Vec x, Vec xi) : vec(std::move(x)), cov(std::move(xi)) {
        if (vec.size() != cov.size())
            throw DimensionError("SplitElement: tangent and cotangent parts differ in dimension");
    }

    [[nodiscard]] Eigen::Index dim() const { return vec.size(); }

    [[nodiscard]] Vec stacked() const {
        Vec s(2 * dim());
        s << vec, cov;
        return s;
    }

    static SplitElement from_stacked(const Vec& s) {
        if (s.size() % 2 != 0) throw DimensionError("SplitElement: odd stacked length");
        const Eigen::Index d = s.size() / 2;
        return {s.head(d), s.tail(d)};
    }
};

/// Matrix Q of the natural pairing <X+xi, Y+eta> = (eta(X) + xi(Y)) / 2.
inline Mat pairing_matrix(Eigen::Index d) {
    Mat q = Mat::Zero(2 * d, 2 * d);
    q.topRightCorner(d, d).setIdentity();
    q.bottomLeftCorner(d, d).setIdentity();
    return 0.5 * q;
}

inline double pairing(const SplitElement& a, const SplitElement& b) {
    if (a.dim() != b.dim()) throw DimensionError("pairing: dimension mismatch");
    return 0.5 * (b.cov.dot(a.vec) + a.cov.dot(b.vec));
}

/// Complex-bilinear (not Hermitian) extension of the pairing to stacked vectors.
template <typename DA, typename DB>
auto pairing_stacked(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    const Eigen::Index d = a.size() / 2;
    return 0.5 * ((b.tail(d).transpose() * a.head(d)).value() +
                  (a.tail(d).transpose() * b.head(d)).value());
}

/// Flat map of a 2-form given by components w_ij = w(e_i, e_j).
inline Mat flat(const Mat& two_form) { return two_form.transpose(); }

/// Candidate generalized (almost) complex structure on one fiber.
class FiberStructure {
public:
    FiberStructure() = default;
    explicit FiberStructure(Mat j) : j_(std::move(j)) {
        if (j_.rows() != j_.cols()) throw DimensionError("FiberStructure: matrix is not square");
    }

    [[nodiscard]] const Mat& matrix() const { return j_; }
    [[nodiscard]] Eigen::Index side() const { return j_.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return j_.rows() / 2; }

private:
    Mat j_;
};

struct StructureCheck {
    bool ok = false;
    double square_residual = 0.0;   // max |J^2 + I|
    double pairing_residual = 0.0;  // max |J^t Q J - Q|
};

inline StructureCheck is_generalized_structure(const FiberStructure& s, double tol = 1e-10) {
    const Mat& j = s.matrix();
    if (j.rows() % 2 != 0) throw DimensionError("is_generalized_structure: odd side length");
    const Eigen::Index d = j.rows() / 2;
    const Mat q = pairing_matrix(d);
    StructureCheck c;
    c.square_residual = max_abs(j * j + identity(2 * d));
    c.pairing_residual = max_abs(j.transpose() * q * j - q);
    c.ok = c.square_residual <= tol && c.pairing_residual <= tol;
    return c;
}

/// The structure [[J, 0], [0, -J^t]] induced by an almost complex matrix.
inline FiberStructure from_complex_structure(const Mat& jsmall) {
    if (jsmall.rows() != jsmall.cols()) throw DimensionError("from_complex_structure: not square");
    const Eigen::Index d = jsmall.rows();
    if (max_abs(jsmall * jsmall + identity(d)) > 1e-10 * std::max(1.0, max_abs(jsmall * jsmall)))
        throw Error("from_complex_structure: input does not square to -I");
    Mat big = Mat::Zero(2 * d, 2 * d);
    big.topLeftCorner(d, d) = jsmall;
    big.bottomRightCorner(d, d) = -jsmall.transpose();
    return FiberStructure(std::move(big));
}

/// The structure [[0, -w^-1], [w, 0]] of a nondegenerate 2-form (w is its flat map).
inline FiberStructure from_symplectic(const Mat& w) {
    if (w.rows() != w.cols()) throw DimensionError("from_symplectic: not square");
    if (!is_antisymmetric(w, 1e-12)) throw Error("from_symplectic: matrix is not antisymmetric");
    const Eigen::Index d = w.rows();
    Eigen::FullPivLU<Mat> lu(w);
    if (d == 0 || !lu.isInvertible()) throw Error("from_symplectic: matrix is singular");
    Mat big = Mat::Zero(2 * d, 2 * d);
    big.topRightCorner(d, d) = -lu.inverse();
    big.bottomLeftCorner(d, d) = w;
    return FiberStructure(std::move(big));
}

/// The shear e^B = [[I, 0], [B, I]].
inline Mat shear(const Mat& b) {
    const Eigen::Index d = b.rows();
    Mat e = identity(2 * d);
    e.bottomLeftCorner(d, d) = b;
    return e;
}

inline FiberStructure b_shift(const FiberStructure& s, const Mat& b) {
    if (b.rows() != s.dim() || b.cols() != s.dim()) throw DimensionError("b_shift: B has wrong size");
    if (!is_antisymmetric(b, 1e-12)) throw Error("b_shift: B is not antisymmetric");
    return FiberStructure(shear(b) * s.matrix() * shear(-b));
}

/// Columns span the +i eigenspace L of a structure.
struct EigenspaceBasis {
    CMat basis;  // 2d x d, orthonormal columns
};

/// Image of the projector (I - iJ)/2, which maps onto L along conj(L).
inline EigenspaceBasis eigenspace(const FiberStructure& s) {
    const Eigen::Index n = s.side();
    const CMat proj = 0.5 * (CMat::Identity(n, n) - kI * s.matrix().cast<cplx>());
    Eigen::JacobiSVD<CMat> svd(proj, Eigen::ComputeThinU);
    return {svd.matrixU().leftCols(n / 2)};
}

inline CMat eigen_projector(const FiberStructure& s) {
    const Eigen::Index n = s.side();
    return 0.5 * (CMat::Identity(n, n) - kI * s.matrix().cast<cplx>());
}

/// Codimension of the tangent projection of L.
inline int type_of(const FiberStructure& s, double tol = 1e-8) {
    const auto check = is_generalized_structure(s, 1e-8);
    if (!check.ok) throw Error("type_of: structure fails the generalized structure axioms");
    const EigenspaceBasis l = eigenspace(s);
    const Eigen::Index d = s.dim();
    return static_cast<int>(d) - numerical_rank(l.basis.topRows(d), tol);
}

/// Bilinear form x^T M y of the metric G(x, y) = <G x, y>.
inline Mat metric_bilinear(const Mat& g_endo) {
    const Eigen::Index d = g_endo.rows() / 2;
    const Mat m = g_endo.transpose() * pairing_matrix(d);
    return 0.5 * (m + m.transpose());
}

/// Smallest eigenvalue of the bilinear form <G x, x>; positive iff G is positive definite.
inline double metric_min_eigenvalue(const Mat& g_endo) {
    Eigen::SelfAdjointEigenSolver<Mat> es(metric_bilinear(g_endo));
    return es.eigenvalues().minCoeff();
}

/// The metric [[0, g^-1], [g, 0]] on V + V* induced by g.
inline Mat induced_generalized_metric(const Mat& g) {
    const Eigen::Index d = g.rows();
    Mat big = Mat::Zero(2 * d, 2 * d);
    big.topRightCorner(d, d) = g.inverse();
    big.bottomLeftCorner(d, d) = g;
    return big;
}

/// A structure J' commuting with J such that -J J' is a positive definite metric.
///
/// W(x, y) = <J x, y> is written as Gt(A x, y) for the metric Gt induced by g,
/// and J' is the orthogonal part (A A*)^{-1/2} A of the polar decomposition of
/// A, with the adjoint taken with respect to Gt.
inline FiberStructure compatible_structure(const FiberStructure& s, const Mat& g) {
    const Eigen::Index d = s.dim();
    if (g.rows() != d || g.cols() != d) throw DimensionError("compatible_structure: metric has wrong size");
    if (!is_spd(g)) throw Error("compatible_structure: metric is not symmetric positive definite");
    if (!is_generalized_structure(s, 1e-8).ok)
        throw Error("compatible_structure: input fails the generalized structure axioms");

    const Mat q = pairing_matrix(d);
    const Mat gt = induced_generalized_metric(g);
    const Mat mg = gt.transpose() * q;         // bilinear matrix of Gt (symmetric)
    const Mat mw = s.matrix().transpose() * q;  // bilinear matrix of W
    const Mat mg_inv = mg.inverse();
    const Mat a = mg_inv * mw.transpose();
    const Mat a_adj = mg_inv * a.transpose() * mg;
    const Mat p = a * a_adj;

    // Conjugate by mg^{1/2} so the Gt-self-adjoint p becomes symmetric.
    Eigen::SelfAdjointEigenSolver<Mat> mg_es(0.5 * (mg + mg.transpose()));
    const Vec mg_eval = mg_es.eigenvalues();
    if (mg_eval.minCoeff() <= 0.0) throw Error("compatible_structure: induced metric is not positive");
    const Mat& mv = mg_es.eigenvectors();
    const Mat root = mv * mg_eval.cwiseSqrt().asDiagonal() * mv.transpose();
    const Mat root_inv = mv * mg_eval.cwiseSqrt().cwiseInverse().asDiagonal() * mv.transpose();
    Mat ps = root * p * root_inv;
    ps = 0.5 * (ps + ps.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> es(ps);
    if (es.info() != Eigen::Success) throw Error("compatible_structure: eigendecomposition failed");
    const Vec lam = es.eigenvalues();
    if (lam.minCoeff() < 1e-14) throw Error("compatible_structure: A A* is numerically singular");
    const Mat& u = es.eigenvectors();
    const Mat inv_sqrt_s = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
    const Mat inv_sqrt_p = root_inv * inv_sqrt_s * root;
    return FiberStructure(inv_sqrt_p * a);
}

/// Metric, 2-form and the two orthogonal almost complex structures of a compatible pair.
struct GualtieriData {
    Mat g;        // symmetric positive definite
    Mat b;        // flat map of the 2-form b
    Mat j_plus;
    Mat j_minus;

    [[nodiscard]] Mat omega_plus() const { return g * j_plus; }
    [[nodiscard]] Mat omega_minus() const { return g * j_minus; }
};

/// Rebuilds (J1, J2) from (g, b, J+, J-): J1 uses the upper signs, J2 the lower.
inline std::pair<FiberStructure, FiberStructure> gualtieri_reconstruct(const GualtieriData& q) {
    const Eigen::Index d = q.g.rows();
    const Mat wp = q.omega_plus();
    const Mat wm = q.omega_minus();
    const Mat wp_inv = wp.inverse();
    const Mat wm_inv = wm.inverse();
    auto assemble = [&](double sign) {
        Mat core(2 * d, 2 * d);
        core.topLeftCorner(d, d) = q.j_plus + sign * q.j_minus;
        core.topRightCorner(d, d) = -(wp_inv - sign * wm_inv);
        core.bottomLeftCorner(d, d) = wp - sign * wm;
        core.bottomRightCorner(d, d) = -(q.j_plus.transpose() + sign * q.j_minus.transpose());
        return FiberStructure(0.5 * shear(q.b) * core * shear(-q.b));
    };
    return {assemble(+1.0), assemble(-1.0)};
}

/// Extracts (g, b, J+, J-) from a commuting pair whose product -J1 J2 is a positive metric.
///
/// The +1 and -1 eigenspaces of G = -J1 J2 are the graphs of b + g and b - g;
/// J+ and J- are J1 restricted to those graphs and transported to the tangent space.
inline GualtieriData gualtieri_decompose(const FiberStructure& j1, const FiberStructure& j2,
                                         double tol = 1e-9) {
    if (j1.side() != j2.side()) throw DimensionError("gualtieri_decompose: size mismatch");
    const Eigen::Index d = j1.dim();
    const Mat& a = j1.matrix();
    const Mat& c = j2.matrix();
    const double scale = std::max(1.0, max_abs(a) * max_abs(c));
    if (max_abs(a * c - c * a) > tol * scale) throw Error("gualtieri_decompose: structures do not commute");
    const Mat gg = -a * c;
    if (!(metric_min_eigenvalue(gg) > 0.0)) throw Error("gualtieri_decompose: -J1 J2 is not positive definite");

    const Mat id = identity(2 * d);
    auto graph = [&](double sign) {
        const Mat lift = (0.5 * (id + sign * gg)).leftCols(d);  // projector applied to (X, 0)
        return Mat(lift.bottomRows(d) * lift.topRows(d).inverse());
    };
    const Mat e_plus = graph(+1.0);   // b + g
    const Mat e_minus = graph(-1.0);  // b - g

    GualtieriData out;
    out.g = 0.5 * (e_plus - e_minus);
    out.g = 0.5 * (out.g + out.g.transpose());
    out.b = 0.5 * (e_plus + e_minus);
    out.b = 0.5 * (out.b - out.b.transpose());
    out.j_plus = a.topLeftCorner(d, d) + a.topRightCorner(d, d) * e_plus;
    out.j_minus = a.topLeftCorner(d, d) + a.topRightCorner(d, d) * e_minus;
    if (!is_spd(out.g)) throw Error("gualtieri_decompose: extracted metric is not positive definite");
    return out;
}

}  // namespace gcmoment
