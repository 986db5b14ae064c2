// Critical sets of moment components: Hessians, index parity, and the
// identities linking the induced vector field to the bi-Hermitian data.
#pragma once

#include "gcmoment/actions.hpp"

namespace gcmoment {

inline constexpr double kHessianStep = 1e-3;

/// The requested level is not a regular value of the leading moment components.
class NonRegularValueError : public Error {
public:
    using Error::Error;
};

struct HessianSpectrum {
    Vec eigenvalues;  // ascending
    int index = 0;
    int coindex = 0;
    int nullity = 0;
};

/// Counts signs with eigenvalues of magnitude <= rel_cut * max|eig| treated as zero.
inline HessianSpectrum classify_hessian(const Mat& h, double rel_cut = 1e-6) {
    HessianSpectrum s;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()));
    s.eigenvalues = es.eigenvalues();
    const double scale = max_abs(s.eigenvalues);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        const double ev = s.eigenvalues(i);
        if (scale > 0.0 && ev < -rel_cut * scale)
            ++s.index;
        else if (scale > 0.0 && ev > rel_cut * scale)
            ++s.coindex;
        else
            ++s.nullity;
    }
    return s;
}

/// Raw central second differences of f; entry (i, j) and (j, i) are computed separately.
inline Mat raw_hessian(const ScalarField& f, const ChartPoint& p, double step = kHessianStep,
                       const SampledManifold* domain = nullptr) {
    check_stencil(domain, p, step);
    const Eigen::Index d = p.x.size();
    Mat h(d, d);
    const double f0 = f(p);
    for (Eigen::Index i = 0; i < d; ++i) {
        h(i, i) = (f(shifted(p, i, step)) - 2.0 * f0 + f(shifted(p, i, -step))) / (step * step);
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            // Derivative along j of the central difference along i.
            auto di = [&](double sj) {
                const ChartPoint q = shifted(p, j, sj);
                return (f(shifted(q, i, step)) - f(shifted(q, i, -step))) / (2.0 * step);
            };
            h(i, j) = (di(step) - di(-step)) / (2.0 * step);
        }
    }
    return h;
}

/// Symmetrized coordinate Hessian of mu^xi at a critical point.
inline Mat hessian_at_critical(const ActionSpec& action, const MomentData& md, const ChartPoint& p, const Vec& xi,
                               double fixed_threshold, double step = kHessianStep,
                               const SampledManifold* domain = nullptr) {
    if (max_abs(action.induced_field(p, xi)) >= fixed_threshold)
        throw Error("hessian_at_critical: point is not critical for this direction");
    const Mat h = raw_hessian(md.component(xi), p, step, domain);
    return 0.5 * (h + h.transpose());
}

struct CriticalEntry {
    std::size_t sample = 0;
    int component = -1;
    Mat hessian;
    HessianSpectrum spectrum;
    double raw_asymmetry = 0.0;
};

struct CriticalReport {
    Vec xi;
    double threshold = 0.0;
    std::vector<CriticalEntry> entries;          // ordered by sample id
    std::vector<FixedComponent> components;
    bool parity_ok = true;                       // even index and coindex everywhere
    bool nullity_matches_dimension = true;
    double max_raw_asymmetry = 0.0;
    double max_component_spread = 0.0;

    /// Distinct (index, coindex) pairs, one per component in component order.
    [[nodiscard]] std::vector<std::pair<int, int>> component_indices() const {
        std::vector<std::pair<int, int>> out(components.size(), {-1, -1});
        for (const auto& e : entries) {
            auto& slot = out[static_cast<std::size_t>(e.component)];
            if (slot.first < 0) slot = {e.spectrum.index, e.spectrum.coindex};
        }
        return out;
    }
};

/// Hessian analysis at every sample of Crit(mu^xi) = Fix of the one-parameter subgroup of xi.
inline CriticalReport analyze_critical_set(const SampledManifold& m, const ActionSpec& action, const MomentData& md,
                                           const Vec& xi, double fixed_tol = 1e-6, double step = kHessianStep,
                                           int jobs = 1) {
    const auto [dir_action, dir_md] = direction_action(action, md, xi);
    const FixedPointSet fixed = fixed_point_components(m, dir_action, dir_md, fixed_tol, jobs);
    CriticalReport rep;
    rep.xi = xi;
    rep.threshold = fixed.threshold;
    rep.components = fixed.components;
    for (std::size_t c = 0; c < fixed.components.size(); ++c)
        for (std::size_t i : fixed.components[c].members) {
            CriticalEntry e;
            e.sample = i;
            e.component = static_cast<int>(c);
            rep.entries.push_back(std::move(e));
        }
    std::sort(rep.entries.begin(), rep.entries.end(),
              [](const CriticalEntry& a, const CriticalEntry& b) { return a.sample < b.sample; });
    const ScalarField f = md.component(xi);
    parallel_for(rep.entries.size(), jobs, [&](std::size_t k) {
        auto& e = rep.entries[k];
        const ChartPoint p = m.point(e.sample);
        const Mat raw = raw_hessian(f, p, step, &m);
        e.raw_asymmetry = max_abs(Mat(raw - raw.transpose()));
        e.hessian = 0.5 * (raw + raw.transpose());
        e.spectrum = classify_hessian(e.hessian);
    });
    for (const auto& e : rep.entries) {
        rep.max_raw_asymmetry = std::max(rep.max_raw_asymmetry, e.raw_asymmetry);
        if (e.spectrum.index % 2 != 0 || e.spectrum.coindex % 2 != 0) rep.parity_ok = false;
        if (e.spectrum.nullity != rep.components[static_cast<std::size_t>(e.component)].dimension)
            rep.nullity_matches_dimension = false;
    }
    for (const auto& c : rep.components)
        rep.max_component_spread = std::max(rep.max_component_spread, std::abs(c.spread));
    return rep;
}

struct CritFixReport {
    std::vector<std::size_t> critical;       // |d mu^xi| small
    std::vector<std::size_t> fixed;          // |xi_M| small
    std::vector<std::size_t> discrepancies;  // symmetric difference
    [[nodiscard]] bool ok() const { return discrepancies.empty(); }
};

/// Compares {|d mu^xi| < tol * median} with {|xi_M| < tol * median} as sample sets.
inline CritFixReport crit_equals_fixed_check(const SampledManifold& m, const ActionSpec& action,
                                             const MomentData& md, const Vec& xi, double tol = 1e-6,
                                             double step = kDefaultStep, int jobs = 1) {
    std::vector<double> grad(m.size()), field(m.size());
    const ScalarField f = md.component(xi);
    parallel_for(m.size(), jobs, [&](std::size_t i) {
        const ChartPoint p = m.point(i);
        grad[i] = max_abs(fd_gradient(f, p, step));
        field[i] = max_abs(action.induced_field(p, xi));
    });
    const double gcut = tol * median(grad);
    const double fcut = tol * median(field);
    CritFixReport rep;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const bool c = grad[i] < gcut;
        const bool x = field[i] < fcut;
        if (c) rep.critical.push_back(i);
        if (x) rep.fixed.push_back(i);
        if (c != x) rep.discrepancies.push_back(i);
    }
    return rep;
}

/// |xi_M - (omega_+^-1 - omega_-^-1) d mu^xi / 2| with (J+, J-) from the pair (J, J').
inline double induced_field_identity_residual(const GualtieriData& q, const ActionSpec& action,
                                              const MomentData& md, const ChartPoint& p, const Vec& xi,
                                              double step = kDefaultStep, const SampledManifold* domain = nullptr) {
    const Vec v = action.induced_field(p, xi);
    const Vec dmu = fd_gradient(md.component(xi), p, step, domain);
    const Vec rhs = 0.5 * (q.omega_plus().inverse() * dmu - q.omega_minus().inverse() * dmu);
    return max_abs(Vec(v - rhs));
}

inline double induced_field_identity_residual(const FiberStructure& j, const FiberStructure& jprime,
                                              const ActionSpec& action, const MomentData& md, const ChartPoint& p,
                                              const Vec& xi, double step = kDefaultStep,
                                              const SampledManifold* domain = nullptr) {
    return induced_field_identity_residual(gualtieri_decompose(j, jprime), action, md, p, xi, step, domain);
}

/// At a critical point: |D(xi_M) + (J+ - J-) g^-1 Hess(mu^xi) / 2|, the linearized
/// flow compared against the Hessian as an endomorphism.
inline double lxi_identity_residual(const GualtieriData& q, const ActionSpec& action, const MomentData& md,
                                    const ChartPoint& p, const Vec& xi, double step = kHessianStep,
                                    const SampledManifold* domain = nullptr) {
    const VectorField v = [&](const ChartPoint& r) { return action.induced_field(r, xi); };
    const Mat lin = fd_jacobian(v, p, step, domain);
    Mat h = raw_hessian(md.component(xi), p, step, domain);
    h = 0.5 * (h + h.transpose());
    const Mat rhs = -0.5 * (q.j_plus - q.j_minus) * q.g.inverse() * h;
    return max_abs(Mat(lin - rhs));
}

inline double lxi_identity_residual(const FiberStructure& j, const FiberStructure& jprime, const ActionSpec& action,
                                    const MomentData& md, const ChartPoint& p, const Vec& xi,
                                    double step = kHessianStep, const SampledManifold* domain = nullptr) {
    return lxi_identity_residual(gualtieri_decompose(j, jprime), action, md, p, xi, step, domain);
}

struct SliceCritical {
    std::size_t sample = 0;
    int component = -1;
    HessianSpectrum spectrum;  // of the Hessian restricted to the slice tangent space
};

struct SliceReport {
    Vec level;                 // (a_1 .. a_{m-1})
    double eps = 0.0;
    std::size_t slice_samples = 0;
    std::vector<SliceCritical> critical;
    int component_count = 0;
    bool parity_ok = true;

    /// (index, coindex) of each critical component.
    [[nodiscard]] std::vector<std::pair<int, int>> component_indices() const {
        std::vector<std::pair<int, int>> out(static_cast<std::size_t>(component_count), {-1, -1});
        for (const auto& c : critical) {
            auto& slot = out[static_cast<std::size_t>(c.component)];
            if (slot.first < 0) slot = {c.spectrum.index, c.spectrum.coindex};
        }
        return out;
    }
};

/// Twice the largest change of the given moment components across a graph edge.
inline double default_band_width(const SampledManifold& m, const std::function<Vec(const ChartPoint&)>& f,
                                 int jobs = 1) {
    std::vector<Vec> val(m.size());
    parallel_for(m.size(), jobs, [&](std::size_t i) { val[i] = f(m.point(i)); });
    std::vector<double> worst(m.size(), 0.0);
    parallel_for(m.size(), jobs, [&](std::size_t i) {
        std::vector<std::size_t> nb;
        m.neighbors(i, nb);
        for (std::size_t j : nb) worst[i] = std::max(worst[i], max_abs(Vec(val[j] - val[i])));
    });
    return 2.0 * *std::max_element(worst.begin(), worst.end());
}

/// Restricts mu_m to the thickened slice Q = {mu_1..m-1 = a} and checks that its
/// critical samples carry even index and coindex on the tangent space of Q.
inline SliceReport slice_morse_check(const SampledManifold& m, const MomentData& md, int rank, const Vec& a_partial,
                                     double tol = 1e-6, double regular_tol = 1e-3, double step = kDefaultStep,
                                     double hess_step = kHessianStep, int jobs = 1) {
    if (rank < 2 || a_partial.size() != rank - 1) throw DimensionError("slice_morse_check: need m >= 2 and m-1 levels");
    const int k = rank - 1;
    const auto leading = [&](const ChartPoint& p) { return Vec(md.mu(p).head(k)); };
    SliceReport rep;
    rep.level = a_partial;
    rep.eps = default_band_width(m, leading, jobs);

    std::vector<char> in_slice(m.size(), 0);
    parallel_for(m.size(), jobs,
                 [&](std::size_t i) { in_slice[i] = max_abs(Vec(leading(m.point(i)) - a_partial)) <= rep.eps; });
    std::vector<std::size_t> slice;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (in_slice[i]) slice.push_back(i);
    rep.slice_samples = slice.size();
    if (slice.empty()) return rep;

    struct Local {
        Mat lead;     // k x d gradient rows
        Vec last;     // gradient of mu_m
        Vec residual; // projected gradient
        double lead_sv = 0.0;
    };
    std::vector<Local> loc(slice.size());
    parallel_for(slice.size(), jobs, [&](std::size_t s) {
        const ChartPoint p = m.point(slice[s]);
        Local& l = loc[s];
        l.lead.resize(k, p.x.size());
        for (int r = 0; r < k; ++r) l.lead.row(r) = fd_gradient(md.component(unit(rank, r)), p, step).transpose();
        l.last = fd_gradient(md.component(unit(rank, k)), p, step);
        Eigen::JacobiSVD<Mat> svd(l.lead);
        l.lead_sv = svd.singularValues()(k - 1);
        const Vec c = l.lead.transpose().colPivHouseholderQr().solve(l.last);
        l.residual = l.last - l.lead.transpose() * c;
    });

    std::vector<double> scale;
    for (const auto& l : loc) scale.push_back(l.lead.norm());
    const double lead_scale = *std::max_element(scale.begin(), scale.end());
    for (std::size_t s = 0; s < slice.size(); ++s)
        if (loc[s].lead_sv < regular_tol * lead_scale)
            throw NonRegularValueError("slice_morse_check: leading moment components drop rank at sample " +
                                       std::to_string(slice[s]));

    std::vector<double> grads;
    for (const auto& l : loc) grads.push_back(l.last.norm());
    const double cut = tol * std::max(median(grads), 1e-300);
    std::vector<char> crit(m.size(), 0);
    std::vector<std::size_t> crit_ids;
    std::vector<Vec> mult;
    for (std::size_t s = 0; s < slice.size(); ++s)
        if (loc[s].residual.norm() < cut) {
            crit[slice[s]] = 1;
            crit_ids.push_back(slice[s]);
            mult.push_back(loc[s].lead.transpose().colPivHouseholderQr().solve(loc[s].last));
        }
    const ComponentLabels labels = induced_components(m, crit);
    rep.component_count = labels.count;
    rep.critical.resize(crit_ids.size());
    parallel_for(crit_ids.size(), jobs, [&](std::size_t s) {
        const ChartPoint p = m.point(crit_ids[s]);
        // Lagrange function mu_m - c . mu_{<m} on the kernel of the leading differentials.
        Vec xi = Vec::Zero(rank);
        xi.head(k) = -mult[s];
        xi(k) = 1.0;
        Mat h = raw_hessian(md.component(xi), p, hess_step, &m);
        h = 0.5 * (h + h.transpose());
        Mat lead(k, p.x.size());
        for (int r = 0; r < k; ++r) lead.row(r) = fd_gradient(md.component(unit(rank, r)), p, step).transpose();
        Eigen::FullPivLU<Mat> lu(lead);
        Mat basis = lu.kernel();
        basis = Eigen::HouseholderQR<Mat>(basis).householderQ() * Mat::Identity(basis.rows(), basis.cols());
        auto& out = rep.critical[s];
        out.sample = crit_ids[s];
        out.component = labels.label[crit_ids[s]];
        out.spectrum = classify_hessian(basis.transpose() * h * basis);
    });
    for (const auto& c : rep.critical)
        if (c.spectrum.index % 2 != 0 || c.spectrum.coindex % 2 != 0) rep.parity_ok = false;
    return rep;
}

}  // namespace gcmoment
