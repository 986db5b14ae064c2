// Built-in analytic examples: sampled manifold, structure and metric fields,
// torus action and generalized moment data, plus the expected outcomes.
#pragma once

#include "gcmoment/actions.hpp"

namespace gcmoment {

struct Expectations {
    bool hamiltonian = true;
    bool integrable = true;
    std::vector<Vec> fixed_images;                    // a_i, the hull vertices of mu(M)
    std::vector<std::pair<int, int>> generic_indices; // (index, coindex) per fixed component, sorted
};

struct Example {
    std::string name;
    std::string description;
    std::string instantiates;
    int resolution = 64;
    ManifoldPtr manifold;
    FieldSet fields;
    ActionSpec action;
    MomentData moment;
    /// Lie algebra directions for critical-set analysis; the first is generic.
    std::vector<Vec> directions;
    Expectations expected;
};

struct CatalogEntry {
    std::string name;
    std::string description;
    std::string instantiates;
};

namespace detail {

using SP = SphereSampling;

/// Height z in either sphere chart.
inline double sphere_z(const ChartPoint& p) {
    if (p.chart == SP::kBand) return p.x(1);
    const double s = std::sqrt(std::max(0.0, 1.0 - p.x.squaredNorm()));
    return p.chart == SP::kNorth ? s : -s;
}

/// Components of the area form: dtheta ^ dz on the band, dx ^ dy / z on the caps.
inline Mat sphere_area(const ChartPoint& p) {
    const double c = p.chart == SP::kBand ? 1.0 : 1.0 / sphere_z(p);
    Mat w(2, 2);
    w << 0.0, c, -c, 0.0;
    return w;
}

/// Round metric in chart coordinates.
inline Mat sphere_metric(const ChartPoint& p) {
    if (p.chart == SP::kBand) {
        const double s = 1.0 - p.x(1) * p.x(1);
        return Eigen::Vector2d(s, 1.0 / s).asDiagonal();
    }
    const double z = sphere_z(p);
    return identity(2) + p.x * p.x.transpose() / (z * z);
}

/// Rotation generator d/dtheta.
inline Vec sphere_rotation_field(const ChartPoint& p) {
    if (p.chart == SP::kBand) return Eigen::Vector2d(1.0, 0.0);
    return Eigen::Vector2d(-p.x(1), p.x(0));
}

inline Vec sphere_dz(const ChartPoint& p) {
    if (p.chart == SP::kBand) return Eigen::Vector2d(0.0, 1.0);
    return -p.x / sphere_z(p);
}

inline ChartPoint sphere_rotate(double t, const ChartPoint& p) {
    ChartPoint q = p;
    if (p.chart == SP::kBand) {
        q.x(0) += t;
    } else {
        const double c = std::cos(t), s = std::sin(t);
        q.x(0) = c * p.x(0) - s * p.x(1);
        q.x(1) = s * p.x(0) + c * p.x(1);
    }
    return q;
}

inline Mat block_diag(const Mat& a, const Mat& b) {
    Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

/// Sphere factor of a product: full rings, reduced angular density.
inline ManifoldPtr product_sphere(int n) { return std::make_shared<SphereSampling>(n, 4, 3); }

inline int torus_points(int n) { return std::max(8, n / 8); }

/// Sign s of the twist H = s d(b) that makes the b-shifted product structure integrable.
inline constexpr double kTwistSign = -1.0;

inline Example sphere_rotation(int n) {
    Example ex;
    ex.name = "sphere_rotation";
    ex.description = "S^2 with the area form, circle rotation, mu = z, alpha = 0, H = 0";
    ex.instantiates = "symplectic structure as a generalized complex structure; classical moment map";
    ex.resolution = n;
    ex.manifold = std::make_shared<SphereSampling>(n);
    ex.fields.omega = [](const ChartPoint& p) { return Form::from_matrix(sphere_area(p)); };
    ex.fields.structure = [](const ChartPoint& p) { return from_symplectic(flat(sphere_area(p))); };
    ex.fields.metric = sphere_metric;
    ex.fields.twist = {};
    ex.action.rank = 1;
    ex.action.generators = {sphere_rotation_field};
    ex.action.act = [](const Vec& th, const ChartPoint& p) { return sphere_rotate(th(0), p); };
    ex.moment.mu = [](const ChartPoint& p) { return Vec::Constant(1, sphere_z(p)); };
    ex.directions = {Vec::Ones(1)};
    ex.expected.fixed_images = {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
    ex.expected.generic_indices = {{0, 2}, {2, 0}};
    return ex;
}

inline Example broken_moment_control(int n) {
    Example ex = sphere_rotation(n);
    ex.name = "broken_moment_control";
    ex.description = "sphere_rotation with mu = z + 0.1 z^2, which violates the moment condition";
    ex.instantiates = "negative control for the moment condition";
    ex.moment.mu = [](const ChartPoint& p) {
        const double z = sphere_z(p);
        return Vec::Constant(1, z + 0.1 * z * z);
    };
    ex.expected.hamiltonian = false;
    ex.expected.fixed_images = {Vec::Constant(1, -0.9), Vec::Constant(1, 1.1)};
    return ex;
}

inline Example sphere_bshift(int n) {
    Example ex = sphere_rotation(n);
    ex.name = "sphere_bshift";
    ex.description = "sphere_rotation transformed by the invariant closed B = z omega / 2; alpha = i_xi B";
    ex.instantiates = "B-field transform of a Hamiltonian action: mu unchanged, alpha shifted by i_xi B";
    const auto bfield = [](const ChartPoint& p) { return Mat(0.5 * sphere_z(p) * sphere_area(p)); };
    ex.fields.bfield = [bfield](const ChartPoint& p) { return Form::from_matrix(bfield(p)); };
    ex.fields.structure = [bfield](const ChartPoint& p) {
        return b_shift(from_symplectic(flat(sphere_area(p))), flat(bfield(p)));
    };
    ex.moment.alpha = [bfield](const ChartPoint& p) {
        return Mat(Form::from_matrix(bfield(p)).interior(sphere_rotation_field(p)).as_vector().transpose());
    };
    return ex;
}

inline Example product_spheres(int n) {
    Example ex;
    ex.name = "product_spheres_T2";
    ex.description = "S^2 x S^2 with the product area form, T^2 rotating each factor, mu = (z1, z2)";
    ex.instantiates = "product of symplectic structures with a 2-torus action; polytope is a square";
    ex.resolution = n;
    auto prod = std::make_shared<ProductManifold>(product_sphere(n), product_sphere(n));
    ex.manifold = prod;
    const auto split = [prod](const ChartPoint& p) { return prod->split(p); };
    const auto area = [split](const ChartPoint& p) {
        const auto [a, b] = split(p);
        return block_diag(sphere_area(a), sphere_area(b));
    };
    ex.fields.omega = [area](const ChartPoint& p) { return Form::from_matrix(area(p)); };
    ex.fields.structure = [area](const ChartPoint& p) { return from_symplectic(flat(area(p))); };
    ex.fields.metric = [split](const ChartPoint& p) {
        const auto [a, b] = split(p);
        return block_diag(sphere_metric(a), sphere_metric(b));
    };
    ex.action.rank = 2;
    ex.action.generators = {
        [split](const ChartPoint& p) {
            Vec v = Vec::Zero(4);
            v.head(2) = sphere_rotation_field(split(p).first);
            return v;
        },
        [split](const ChartPoint& p) {
            Vec v = Vec::Zero(4);
            v.tail(2) = sphere_rotation_field(split(p).second);
            return v;
        }};
    ex.action.act = [prod](const Vec& th, const ChartPoint& p) {
        const auto [a, b] = prod->split(p);
        return prod->join(sphere_rotate(th(0), a), sphere_rotate(th(1), b));
    };
    ex.moment.mu = [split](const ChartPoint& p) {
        const auto [a, b] = split(p);
        return Vec(Eigen::Vector2d(sphere_z(a), sphere_z(b)));
    };
    const double lambda = (std::sqrt(5.0) - 1.0) / 2.0;
    ex.directions = {Eigen::Vector2d(1.0, lambda), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
                     Eigen::Vector2d(1.0, 1.0)};
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) ex.expected.fixed_images.emplace_back(Eigen::Vector2d(s1, s2));
    ex.expected.generic_indices = {{0, 4}, {2, 2}, {2, 2}, {4, 0}};
    return ex;
}

inline Example twisted_sphere_torus(int n) {
    Example ex;
    ex.name = "twisted_sphere_torus";
    ex.description =
        "S^2 x T^2, product symplectic structure transformed by the non-closed b = z dt1^dt2; H = -db, mu = z";
    ex.instantiates = "genuinely twisted generalized complex structure with a Hamiltonian circle action";
    ex.resolution = n;
    auto prod = std::make_shared<ProductManifold>(product_sphere(n), std::make_shared<FlatTorus>(2, torus_points(n)));
    ex.manifold = prod;
    const auto split = [prod](const ChartPoint& p) { return prod->split(p); };
    const auto area = [split](const ChartPoint& p) {
        Mat t(2, 2);
        t << 0.0, 1.0, -1.0, 0.0;
        return block_diag(sphere_area(split(p).first), t);
    };
    const auto bfield = [split](const ChartPoint& p) {
        Mat b = Mat::Zero(4, 4);
        const double z = sphere_z(split(p).first);
        b(2, 3) = z;
        b(3, 2) = -z;
        return b;
    };
    ex.fields.omega = [area](const ChartPoint& p) { return Form::from_matrix(area(p)); };
    ex.fields.bfield = [bfield](const ChartPoint& p) { return Form::from_matrix(bfield(p)); };
    ex.fields.structure = [area, bfield](const ChartPoint& p) {
        return b_shift(from_symplectic(flat(area(p))), flat(bfield(p)));
    };
    ex.fields.metric = [split](const ChartPoint& p) { return block_diag(sphere_metric(split(p).first), identity(2)); };
    // db = dz ^ dt1 ^ dt2.
    ex.fields.twist = [split](const ChartPoint& p) {
        const Vec dz = sphere_dz(split(p).first);
        return kTwistSign * (dz(0) * Form::basis(4, {0, 2, 3}) + dz(1) * Form::basis(4, {1, 2, 3}));
    };
    ex.action.rank = 1;
    ex.action.generators = {[split](const ChartPoint& p) {
        Vec v = Vec::Zero(4);
        v.head(2) = sphere_rotation_field(split(p).first);
        return v;
    }};
    ex.action.act = [prod](const Vec& th, const ChartPoint& p) {
        const auto [a, b] = prod->split(p);
        return prod->join(sphere_rotate(th(0), a), b);
    };
    ex.moment.mu = [split](const ChartPoint& p) { return Vec::Constant(1, sphere_z(split(p).first)); };
    ex.moment.twist = ex.fields.twist;
    ex.directions = {Vec::Ones(1)};
    ex.expected.fixed_images = {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
    ex.expected.generic_indices = {{0, 2}, {2, 0}};
    return ex;
}

inline Example nonintegrable_control(int n) {
    Example ex;
    ex.name = "nonintegrable_control";
    ex.description = "R^4 chart with the non-closed form dx1^dy1 + (1 + x1) dx2^dy2; no action";
    ex.instantiates = "positive control for the integrability detector";
    ex.resolution = n;
    ex.manifold = std::make_shared<BoxGrid>(4, std::max(4, n / 8), -0.5, 0.5,
                                            [](const Vec& x, double margin) { return x(0) - margin > -1.0; });
    const auto form = [](const ChartPoint& p) {
        Mat w = Mat::Zero(4, 4);
        w(0, 1) = 1.0;
        w(1, 0) = -1.0;
        w(2, 3) = 1.0 + p.x(0);
        w(3, 2) = -(1.0 + p.x(0));
        return w;
    };
    ex.fields.omega = [form](const ChartPoint& p) { return Form::from_matrix(form(p)); };
    ex.fields.structure = [form](const ChartPoint& p) { return from_symplectic(flat(form(p))); };
    ex.fields.metric = [](const ChartPoint&) { return identity(4); };
    ex.action.rank = 0;
    ex.moment.mu = [](const ChartPoint&) { return Vec(0); };
    ex.expected.hamiltonian = false;
    ex.expected.integrable = false;
    return ex;
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"sphere_rotation",      "product_spheres_T2",
                                                "sphere_bshift",        "twisted_sphere_torus",
                                                "nonintegrable_control", "broken_moment_control"};
    return names;
}

/// A fully wired example; sample counts scale with the resolution n.
inline Example load(const std::string& name, int resolution = 64) {
    if (resolution < 1) throw Error("load: resolution must be positive");
    if (name == "sphere_rotation") return detail::sphere_rotation(resolution);
    if (name == "product_spheres_T2") return detail::product_spheres(resolution);
    if (name == "sphere_bshift") return detail::sphere_bshift(resolution);
    if (name == "twisted_sphere_torus") return detail::twisted_sphere_torus(resolution);
    if (name == "nonintegrable_control") return detail::nonintegrable_control(resolution);
    if (name == "broken_moment_control") return detail::broken_moment_control(resolution);
    throw Error("load: unknown example '" + name + "'");
}

inline std::vector<CatalogEntry> list_catalog() {
    std::vector<CatalogEntry> out;
    for (const auto& n : catalog_names()) {
        const Example ex = load(n, 16);
        out.push_back({ex.name, ex.description, ex.instantiates});
    }
    return out;
}

}  // namespace gcmoment
