// Torus actions with generalized moment data: the two Hamiltonian conditions,
// subtorus restriction, effectiveness and fixed-point detection.
//
// The torus is R^m / (2 pi Z)^m; generator k induces the vector field
// (xi_k)_M and the one-parameter group t -> act(t e_k, .).
#pragma once

#include "gcmoment/fields.hpp"
#include "gcmoment/parallel.hpp"

#include <random>

namespace gcmoment {

struct ActionSpec {
    int rank = 0;
    std::vector<VectorField> generators;
    /// Moves a point by the group element with the given angles; stays in the same chart.
    std::function<ChartPoint(const Vec& angles, const ChartPoint&)> act;

    /// (xi)_M at p for xi in the Lie algebra.
    [[nodiscard]] Vec induced_field(const ChartPoint& p, const Vec& xi) const {
        Vec v = Vec::Zero(p.x.size());
        for (int k = 0; k < rank; ++k)
            if (xi(k) != 0.0) v += xi(k) * generators[static_cast<std::size_t>(k)](p);
        return v;
    }

    /// max_k |(xi_k)_M(p)|.
    [[nodiscard]] double generator_scale(const ChartPoint& p) const {
        double s = 0.0;
        for (const auto& g : generators) s = std::max(s, max_abs(g(p)));
        return s;
    }
};

struct MomentData {
    std::function<Vec(const ChartPoint&)> mu;
    /// Row k is the moment one form alpha_k; empty function means alpha = 0.
    std::function<Mat(const ChartPoint&)> alpha;
    FormField twist;

    [[nodiscard]] ScalarField component(const Vec& xi) const {
        return [mu = mu, xi](const ChartPoint& p) { return mu(p).dot(xi); };
    }

    [[nodiscard]] Vec alpha_component(const ChartPoint& p, const Vec& xi) const {
        if (!alpha) return Vec::Zero(p.x.size());
        return alpha(p).transpose() * xi;
    }

    [[nodiscard]] FormField alpha_form(const Vec& xi) const {
        return [a = alpha, xi](const ChartPoint& p) {
            if (!a) return Form(1, static_cast<int>(p.x.size()));
            return Form::covector(a(p).transpose() * xi);
        };
    }
};

/// |J v - i v| for v = xi_M - i(d mu^xi + i alpha^xi) = (xi_M, alpha^xi - i d mu^xi); zero iff v lies in L.
inline double moment_condition_residual(const FieldSet& fields, const ActionSpec& action, const MomentData& md,
                                        const ChartPoint& p, const Vec& xi, double step = kDefaultStep,
                                        const SampledManifold* domain = nullptr) {
    const Eigen::Index d = p.x.size();
    CVec v(2 * d);
    v.head(d) = action.induced_field(p, xi).cast<cplx>();
    const Vec dmu = fd_gradient(md.component(xi), p, step, domain);
    v.tail(d) = md.alpha_component(p, xi).cast<cplx>() - kI * dmu.cast<cplx>();
    const CMat j = fields.structure(p).matrix().cast<cplx>();
    return max_abs(CVec(j * v - kI * v));
}

/// |i_{xi_M} H - d alpha^xi| at p.
inline double twist_condition_residual(const ActionSpec& action, const MomentData& md, const ChartPoint& p,
                                       const Vec& xi, double step = kDefaultStep,
                                       const SampledManifold* domain = nullptr) {
    const int d = static_cast<int>(p.x.size());
    Form lhs(2, d);
    if (md.twist) lhs = md.twist(p).interior(action.induced_field(p, xi));
    Form rhs(2, d);
    if (md.alpha) rhs = fd_exterior_derivative(md.alpha_form(xi), p, step, domain);
    return (lhs - rhs).max_abs();
}

/// Action and moment data pulled back along a linear map A : R^k -> R^m (columns = new generators).
inline std::pair<ActionSpec, MomentData> pull_back_action(const ActionSpec& action, const MomentData& md,
                                                          const Mat& a) {
    if (a.rows() != action.rank) throw DimensionError("pull_back_action: A must have m rows");
    ActionSpec out;
    out.rank = static_cast<int>(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const Vec col = a.col(j);
        out.generators.push_back([action, col](const ChartPoint& p) { return action.induced_field(p, col); });
    }
    if (action.act)
        out.act = [act = action.act, a](const Vec& angles, const ChartPoint& p) { return act(a * angles, p); };
    MomentData m;
    m.mu = [mu = md.mu, a](const ChartPoint& p) { return Vec(a.transpose() * mu(p)); };
    if (md.alpha) m.alpha = [al = md.alpha, a](const ChartPoint& p) { return Mat(a.transpose() * al(p)); };
    m.twist = md.twist;
    return {out, m};
}

/// Restriction to the subtorus given by an integer matrix of maximal rank:
/// mu_A = A^t mu and alpha_A^xi = alpha^{A xi}.
inline std::pair<ActionSpec, MomentData> subtorus_restrict(const ActionSpec& action, const MomentData& md,
                                                           const Eigen::MatrixXi& a) {
    if (a.rows() != action.rank || a.cols() > a.rows() || a.cols() < 1)
        throw DimensionError("subtorus_restrict: A must be m x k with 1 <= k <= m");
    const Mat ad = a.cast<double>();
    if (numerical_rank(ad, 1e-12) < a.cols()) throw Error("subtorus_restrict: A is rank deficient");
    return pull_back_action(action, md, ad);
}

/// Circle or line action generated by a single Lie algebra element.
inline std::pair<ActionSpec, MomentData> direction_action(const ActionSpec& action, const MomentData& md,
                                                          const Vec& xi) {
    return pull_back_action(action, md, Mat(xi));
}

/// Numerical rank of the stacked rows (d mu_1, ..., d mu_m) over all samples.
inline int effectiveness_rank(const SampledManifold& m, const MomentData& md, int rank, double step = kDefaultStep,
                              double rel_tol = 1e-8) {
    if (m.size() < static_cast<std::size_t>(rank)) throw Error("effectiveness_rank: fewer samples than torus rank");
    // Gram matrix of the m stacked rows; same rank as the stack.
    Mat gram = Mat::Zero(rank, rank);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const ChartPoint p = m.point(i);
        Mat rows(rank, p.x.size());
        for (int k = 0; k < rank; ++k) rows.row(k) = fd_gradient(md.component(unit(rank, k)), p, step).transpose();
        gram += rows * rows.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Vec ev = es.eigenvalues().cwiseAbs();
    if (ev.size() == 0 || ev.maxCoeff() == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::sqrt(ev(i)) > rel_tol * std::sqrt(ev.maxCoeff())) ++r;
    return r;
}

struct FixedComponent {
    std::vector<std::size_t> members;
    int dimension = 0;   // local PCA estimate
    Vec value;           // mean moment value a_i
    double spread = 0.0; // max-norm spread of mu over the members
};

struct FixedPointSet {
    double threshold = 0.0;  // absolute cutoff on max_k |(xi_k)_M|
    double field_scale = 0.0;
    std::vector<FixedComponent> components;
};

/// Dimension of the sample cloud near `center` by PCA of chart offsets within
/// two graph hops; eigenvalues below rel_cut * largest count as zero.
inline int local_pca_dimension(const SampledManifold& m, const std::vector<char>& member, std::size_t center,
                               double rel_cut = 1e-3) {
    const ChartPoint c = m.point(center);
    std::vector<std::size_t> ring{center}, nb, next;
    std::vector<std::size_t> seen{center};
    for (int hop = 0; hop < 2; ++hop) {
        next.clear();
        for (std::size_t i : ring) {
            m.neighbors(i, nb);
            for (std::size_t j : nb)
                if (member[j] && std::find(seen.begin(), seen.end(), j) == seen.end()) {
                    seen.push_back(j);
                    next.push_back(j);
                }
        }
        ring = next;
    }
    if (seen.size() < 2) return 0;
    Mat cov = Mat::Zero(m.dim(), m.dim());
    for (std::size_t j : seen) {
        if (j == center) continue;
        try {
            const Vec off = m.to_chart(m.point(j), c.chart, c.x).x - c.x;
            cov += off * off.transpose();
        } catch (const ChartBoundaryError&) {
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    const Vec ev = es.eigenvalues();
    if (ev.maxCoeff() <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > rel_cut * ev.maxCoeff()) ++r;
    return r;
}

/// Samples where every generator vanishes (below tol times the median generator
/// size), clustered by graph connectivity.
inline FixedPointSet fixed_point_components(const SampledManifold& m, const ActionSpec& action, const MomentData& md,
                                            double tol = 1e-6, int jobs = 1) {
    FixedPointSet out;
    std::vector<double> scale(m.size());
    parallel_for(m.size(), jobs, [&](std::size_t i) { scale[i] = action.generator_scale(m.point(i)); });
    out.field_scale = median(scale);
    out.threshold = tol * out.field_scale;
    std::vector<char> member(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) member[i] = scale[i] < out.threshold;
    const ComponentLabels labels = induced_components(m, member);
    out.components.resize(static_cast<std::size_t>(labels.count));
    for (std::size_t i = 0; i < m.size(); ++i)
        if (labels.label[i] >= 0) out.components[static_cast<std::size_t>(labels.label[i])].members.push_back(i);
    for (auto& comp : out.components) {
        Vec lo, hi, sum;
        for (std::size_t i : comp.members) {
            const Vec v = md.mu(m.point(i));
            if (sum.size() == 0) {
                lo = hi = sum = v;
            } else {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
                sum += v;
            }
        }
        comp.value = sum / static_cast<double>(comp.members.size());
        comp.spread = max_abs(hi - lo);
        // PCA on a deterministic subset keeps large components cheap.
        const std::size_t stride = std::max<std::size_t>(1, comp.members.size() / 64);
        for (std::size_t k = 0; k < comp.members.size(); k += stride)
            comp.dimension = std::max(comp.dimension, local_pca_dimension(m, member, comp.members[k]));
    }
    return out;
}

/// max over random group elements of |mu(theta . p) - mu(p)|.
inline double equivariance_residual(const ActionSpec& action, const MomentData& md, const ChartPoint& p,
                                    std::mt19937_64& rng, int trials = 10) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const Vec base = md.mu(p);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vec th(action.rank);
        for (int k = 0; k < action.rank; ++k) th(k) = angle(rng);
        worst = std::max(worst, max_abs(md.mu(action.act(th, p)) - base));
    }
    return worst;
}

/// |J(theta . p) - T J(p) T^-1| with T = diag(D phi, D phi^-t) the lifted differential.
inline double structure_invariance_residual(const ActionSpec& action, const FieldSet& fields, const ChartPoint& p,
                                            const Vec& angles, double step = kDefaultStep) {
    const ChartPoint q = action.act(angles, p);
    auto moved = [&](const ChartPoint& r) { return action.act(angles, r).x; };
    const Mat dphi = fd_jacobian(moved, p, step);
    const Eigen::Index d = p.x.size();
    Mat t = Mat::Zero(2 * d, 2 * d);
    t.topLeftCorner(d, d) = dphi;
    t.bottomRightCorner(d, d) = dphi.inverse().transpose();
    return max_abs(Mat(fields.structure(q).matrix() - t * fields.structure(p).matrix() * t.inverse()));
}

/// |[(xi_a)_M, (xi_b)_M]| at p over all generator pairs.
inline double generator_commutator(const ActionSpec& action, const ChartPoint& p, double step = kDefaultStep) {
    double worst = 0.0;
    for (int a = 0; a < action.rank; ++a) {
        for (int b = a + 1; b < action.rank; ++b) {
            const auto& ga = action.generators[static_cast<std::size_t>(a)];
            const auto& gb = action.generators[static_cast<std::size_t>(b)];
            const Vec br = fd_jacobian(gb, p, step) * ga(p) - fd_jacobian(ga, p, step) * gb(p);
            worst = std::max(worst, max_abs(br));
        }
    }
    return worst;
}

}  // namespace gcmoment
