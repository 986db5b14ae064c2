// Field evaluators on sampled manifolds, finite-difference exterior calculus,
// and the H-twisted Courant bracket with its integrability residual.
#pragma once

#include "gcmoment/fiber.hpp"
#include "gcmoment/forms.hpp"
#include "gcmoment/manifold.hpp"

#include <functional>
#include <optional>

namespace gcmoment {

inline constexpr double kDefaultStep = 1e-4;

using ScalarField = std::function<double(const ChartPoint&)>;
using VectorField = std::function<Vec(const ChartPoint&)>;
using MatrixField = std::function<Mat(const ChartPoint&)>;
using FormField = std::function<Form(const ChartPoint&)>;
using StructureField = std::function<FiberStructure(const ChartPoint&)>;

/// Geometric data of an example: the structure J, a metric, the twist H and
/// (when the structure was built from them) the symplectic form and B-field.
struct FieldSet {
    StructureField structure;
    MatrixField metric;
    FormField twist;
    FormField omega;  // optional
    FormField bfield;  // optional
};

/// A complex section of (T + T*) (x) C, stacked as (vector part, covector part).
struct Section {
    std::function<CVec(const ChartPoint&)> value;
    /// Optional analytic derivative: column i is the partial derivative along x_i.
    std::function<CMat(const ChartPoint&)> jacobian;
};

/// The frame used for an eigenspace could not be extended smoothly around a point.
class GaugeError : public Error {
public:
    using Error::Error;
};

inline ChartPoint shifted(const ChartPoint& p, Eigen::Index axis, double delta) {
    ChartPoint q = p;
    q.x(axis) += delta;
    return q;
}

inline void check_stencil(const SampledManifold* domain, const ChartPoint& p, double reach) {
    if (domain != nullptr && !domain->in_domain(p, reach))
        throw ChartBoundaryError("finite-difference stencil leaves the chart domain");
}

/// Central-difference partial derivatives of any field whose values support
/// subtraction and scaling; element i is the derivative along x_i.
template <typename F>
auto fd_partials(const F& field, const ChartPoint& p, double step, const SampledManifold* domain = nullptr) {
    check_stencil(domain, p, step);
    using Value = std::decay_t<decltype(field(p))>;
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(p.x.size()));
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
        Value plus = field(shifted(p, i, step));
        Value minus = field(shifted(p, i, -step));
        Value diff = plus - minus;
        diff *= 1.0 / (2.0 * step);
        out.push_back(std::move(diff));
    }
    return out;
}

inline Vec fd_gradient(const ScalarField& f, const ChartPoint& p, double step = kDefaultStep,
                       const SampledManifold* domain = nullptr) {
    check_stencil(domain, p, step);
    Vec g(p.x.size());
    for (Eigen::Index i = 0; i < p.x.size(); ++i)
        g(i) = (f(shifted(p, i, step)) - f(shifted(p, i, -step))) / (2.0 * step);
    return g;
}

/// J(k, i) = d v_k / d x_i.
template <typename Field>
auto fd_jacobian(const Field& v, const ChartPoint& p, double step = kDefaultStep,
                 const SampledManifold* domain = nullptr) {
    check_stencil(domain, p, step);
    using Value = std::decay_t<decltype(v(p))>;
    using Scalar = typename Value::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> jac;
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
        const Value diff = (v(shifted(p, i, step)) - v(shifted(p, i, -step))) / Scalar(2.0 * step);
        if (i == 0) jac.resize(diff.size(), p.x.size());
        jac.col(i) = diff;
    }
    return jac;
}

/// Exterior derivative from central differences of the components:
/// (dw)_{i0..ik} = sum_a (-1)^a d_{i_a} w_{i0..(omit a)..ik}.
inline Form exterior_derivative_from_partials(const std::vector<Form>& partials) {
    const int d = static_cast<int>(partials.size());
    const int k = partials.empty() ? 0 : partials[0].degree();
    Form out(k + 1, d);
    std::vector<int> idx(static_cast<std::size_t>(k + 1), 0);
    std::vector<int> rest(static_cast<std::size_t>(k));
    const std::size_t total = out.components().size();
    for (std::size_t flat_idx = 0; flat_idx < total; ++flat_idx) {
        std::size_t rem = flat_idx;
        for (int a = k; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
        }
        double acc = 0.0;
        for (int a = 0; a <= k; ++a) {
            int r = 0;
            for (int b = 0; b <= k; ++b)
                if (b != a) rest[static_cast<std::size_t>(r++)] = idx[static_cast<std::size_t>(b)];
            const double term = partials[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])].at(rest);
            acc += (a % 2 == 0) ? term : -term;
        }
        out.at(idx) = acc;
    }
    return out;
}

inline Form fd_exterior_derivative(const FormField& form, const ChartPoint& p, double step = kDefaultStep,
                                   const SampledManifold* domain = nullptr) {
    return exterior_derivative_from_partials(fd_partials(form, p, step, domain));
}

/// H(X, Y, .) for complex vectors.
inline CVec contract_twice(const Form& h, const CVec& x, const CVec& y) {
    const int d = h.dim();
    CVec out = CVec::Zero(d);
    if (h.degree() != 3) throw DimensionError("contract_twice: H must be a 3-form");
    const auto& c = h.components();
    for (int i = 0; i < d; ++i) {
        if (x(i) == 0.0) continue;
        for (int j = 0; j < d; ++j) {
            const cplx xy = x(i) * y(j);
            if (xy == 0.0) continue;
            const std::size_t base = (static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)) * d;
            for (int k = 0; k < d; ++k) out(k) += xy * c[base + static_cast<std::size_t>(k)];
        }
    }
    return out;
}

/// Value and first derivatives of a section at one point.
struct SectionJet {
    CVec value;  // stacked (X, xi)
    CMat jac;    // 2d x d, column i = d/dx_i
};

/// [a, b]_H = [X, Y] + L_X eta - L_Y xi - d(eta(X) - xi(Y))/2 + i_Y i_X H
/// in coordinates, given first jets of both sections.
inline CVec courant_bracket_from_jets(const SectionJet& a, const SectionJet& b, const Form* h) {
    const Eigen::Index d = a.value.size() / 2;
    const CVec x = a.value.head(d), xi = a.value.tail(d);
    const CVec y = b.value.head(d), eta = b.value.tail(d);
    const CMat dx = a.jac.topRows(d), dxi = a.jac.bottomRows(d);
    const CMat dy = b.jac.topRows(d), deta = b.jac.bottomRows(d);

    CVec out(2 * d);
    out.head(d) = dy * x - dx * y;
    const CVec lie_x_eta = deta * x + dx.transpose() * eta;
    const CVec lie_y_xi = dxi * y + dy.transpose() * xi;
    const CVec d_pairing = deta.transpose() * x + dx.transpose() * eta - dxi.transpose() * y - dy.transpose() * xi;
    out.tail(d) = lie_x_eta - lie_y_xi - 0.5 * d_pairing;
    if (h != nullptr) out.tail(d) += contract_twice(*h, x, y);
    return out;
}

inline SectionJet section_jet(const Section& s, const ChartPoint& p, double step, const SampledManifold* domain) {
    SectionJet j;
    j.value = s.value(p);
    if (s.jacobian) {
        j.jac = s.jacobian(p);
    } else {
        j.jac = fd_jacobian(s.value, p, step, domain);
    }
    return j;
}

/// The H-twisted Courant bracket of two sections at p, stacked as (vector, covector).
inline CVec courant_bracket(const Section& a, const Section& b, const FormField& h, const ChartPoint& p,
                            double step = kDefaultStep, const SampledManifold* domain = nullptr) {
    const SectionJet ja = section_jet(a, p, step, domain);
    const SectionJet jb = section_jet(b, p, step, domain);
    if (h) {
        const Form hp = h(p);
        return courant_bracket_from_jets(ja, jb, &hp);
    }
    return courant_bracket_from_jets(ja, jb, nullptr);
}

/// Real sections X + xi, returned as a SplitElement.
inline SplitElement courant_bracket(const std::function<SplitElement(const ChartPoint&)>& a,
                                    const std::function<SplitElement(const ChartPoint&)>& b, const FormField& h,
                                    const ChartPoint& p, double step = kDefaultStep,
                                    const SampledManifold* domain = nullptr) {
    auto lift = [](const std::function<SplitElement(const ChartPoint&)>& f) {
        return Section{[f](const ChartPoint& q) { return CVec(f(q).stacked().cast<cplx>()); }, {}};
    };
    const CVec c = courant_bracket(lift(a), lift(b), h, p, step, domain);
    return SplitElement::from_stacked(c.real());
}

struct IntegrabilityResult {
    double residual = 0.0;
    double frame_conditioning = 0.0;  // smallest singular value of the transported frame
};

/// Largest coefficient along conj(L) of the brackets of a local frame of L.
///
/// The frame is the basis of L at p transported by the eigenprojector
/// (I - iJ(q))/2, which is smooth in q. Since L is maximal isotropic, a
/// bracket c lies in L iff <c, l> = 0 for all l in L, so the residual is the
/// largest |2 <[l_a, l_b]_H, l_c>|.
inline IntegrabilityResult integrability_residual(const StructureField& structure, const FormField& h,
                                                  const ChartPoint& p, double step = kDefaultStep,
                                                  const SampledManifold* domain = nullptr) {
    const FiberStructure jp = structure(p);
    if (!is_generalized_structure(jp, 1e-8).ok)
        throw Error("integrability_residual: J fails the structure axioms at the base point");
    const Eigen::Index d = jp.dim();
    const CMat base = eigenspace(jp).basis;
    check_stencil(domain, p, step);

    IntegrabilityResult res;
    res.frame_conditioning = 1e300;
    std::vector<SectionJet> jets(static_cast<std::size_t>(d));
    for (auto& j : jets) j.jac.resize(2 * d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const CMat fp = eigen_projector(structure(shifted(p, i, step))) * base;
        const CMat fm = eigen_projector(structure(shifted(p, i, -step))) * base;
        for (const CMat* f : {&fp, &fm}) {
            Eigen::JacobiSVD<CMat> svd(*f);
            res.frame_conditioning = std::min(res.frame_conditioning, svd.singularValues().minCoeff());
        }
        const CMat diff = (fp - fm) / (2.0 * step);
        for (Eigen::Index a = 0; a < d; ++a) jets[static_cast<std::size_t>(a)].jac.col(i) = diff.col(a);
    }
    if (res.frame_conditioning < 1e-3) throw GaugeError("integrability_residual: transported frame degenerates");
    const CMat at_p = eigen_projector(jp) * base;
    for (Eigen::Index a = 0; a < d; ++a) jets[static_cast<std::size_t>(a)].value = at_p.col(a);

    std::optional<Form> hp;
    if (h) hp = h(p);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const CVec c = courant_bracket_from_jets(jets[static_cast<std::size_t>(a)],
                                                     jets[static_cast<std::size_t>(b)], hp ? &*hp : nullptr);
            for (Eigen::Index e = 0; e < d; ++e)
                res.residual = std::max(res.residual, std::abs(2.0 * pairing_stacked(c, at_p.col(e))));
        }
    }
    return res;
}

}  // namespace gcmoment
