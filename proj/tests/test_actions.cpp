#include "gcmoment/catalog.hpp"

#include <gtest/gtest.h>

using namespace gcmoment;

namespace {

/// Flat R^2 with omega = dx ^ dy, rotation generator (-y, x) and mu = -(x^2 + y^2) / 2,
/// since i_(-y, x)(dx ^ dy) = -x dx - y dy.
struct FlatRotation {
    ManifoldPtr box = std::make_shared<BoxGrid>(2, 9, -1.0, 1.0);
    FieldSet fields;
    ActionSpec action;
    MomentData md;

    FlatRotation() {
        fields.structure = [](const ChartPoint&) {
            Mat w(2, 2);
            w << 0, 1, -1, 0;
            return from_symplectic(flat(w));
        };
        fields.metric = [](const ChartPoint&) { return identity(2); };
        action.rank = 1;
        action.generators = {[](const ChartPoint& p) { return Vec(Eigen::Vector2d(-p.x(1), p.x(0))); }};
        action.act = [](const Vec& th, const ChartPoint& p) {
            const double c = std::cos(th(0)), s = std::sin(th(0));
            return ChartPoint{p.chart, Eigen::Vector2d(c * p.x(0) - s * p.x(1), s * p.x(0) + c * p.x(1))};
        };
        md.mu = [](const ChartPoint& p) { return Vec::Constant(1, -0.5 * p.x.squaredNorm()); };
    }
};

}  // namespace

TEST(MomentCondition, FlatRotationSatisfiesIt) {
    FlatRotation f;
    for (std::size_t i = 0; i < f.box->size(); ++i)
        EXPECT_LT(moment_condition_residual(f.fields, f.action, f.md, f.box->point(i), Vec::Ones(1)), 1e-8);
    // The opposite sign of mu is not a moment map for this orientation.
    MomentData wrong = f.md;
    wrong.mu = [](const ChartPoint& p) { return Vec::Constant(1, 0.5 * p.x.squaredNorm()); };
    EXPECT_GT(moment_condition_residual(f.fields, f.action, wrong, ChartPoint{0, Eigen::Vector2d(0.5, 0.0)},
                                        Vec::Ones(1)),
              0.5);
}

TEST(MomentCondition, ZeroDirectionIsTrivial) {
    FlatRotation f;
    EXPECT_EQ(moment_condition_residual(f.fields, f.action, f.md, f.box->point(3), Vec::Zero(1)), 0.0);
    EXPECT_EQ(twist_condition_residual(f.action, f.md, f.box->point(3), Vec::Zero(1)), 0.0);
}

TEST(MomentCondition, SphereExamplesAndBrokenControl) {
    for (const char* name : {"sphere_rotation", "sphere_bshift"}) {
        const Example ex = load(name, 16);
        double worst = 0.0;
        for (std::size_t i = 0; i < ex.manifold->size(); ++i)
            worst = std::max(worst, moment_condition_residual(ex.fields, ex.action, ex.moment, ex.manifold->point(i),
                                                              Vec::Ones(1)));
        EXPECT_LT(worst, 1e-6) << name;
    }
    const Example broken = load("broken_moment_control", 16);
    double worst = 0.0;
    for (std::size_t i = 0; i < broken.manifold->size(); ++i)
        worst = std::max(worst, moment_condition_residual(broken.fields, broken.action, broken.moment,
                                                          broken.manifold->point(i), Vec::Ones(1)));
    // |d(0.1 z^2)| = 0.2 |z| |dz| is at least 0.2 * 0.8 in band coordinates near the cap boundary.
    EXPECT_GT(worst, 1e-3);
}

TEST(BShift, AlphaIsInteriorOfB) {
    // B = z omega / 2, i_{d/dtheta} B = z dz / 2 in band coordinates.
    const Example ex = load("sphere_bshift", 16);
    const ChartPoint p{SphereSampling::kBand, Eigen::Vector2d(1.0, 0.3)};
    const Vec a = ex.moment.alpha_component(p, Vec::Ones(1));
    EXPECT_NEAR(a(0), 0.0, 1e-15);
    EXPECT_NEAR(a(1), 0.15, 1e-15);
    EXPECT_LT(twist_condition_residual(ex.action, ex.moment, p, Vec::Ones(1)), 1e-9);
}

TEST(TwistCondition, DetectsNonClosedAlpha) {
    FlatRotation f;
    f.md.alpha = [](const ChartPoint& p) { return Mat(Eigen::RowVector2d(0.0, p.x(0))); };
    EXPECT_NEAR(twist_condition_residual(f.action, f.md, f.box->point(4), Vec::Ones(1)), 1.0, 1e-8);
}

TEST(Subtorus, DiagonalCircleOfProduct) {
    const Example ex = load("product_spheres_T2", 16);
    Eigen::MatrixXi a(2, 1);
    a << 1, 1;
    const auto [act, md] = subtorus_restrict(ex.action, ex.moment, a);
    EXPECT_EQ(act.rank, 1);
    const ChartPoint p = ex.manifold->point(1234);
    EXPECT_NEAR(md.mu(p)(0), ex.moment.mu(p).sum(), 1e-15);
    EXPECT_LT(max_abs(Vec(act.induced_field(p, Vec::Ones(1)) - ex.action.induced_field(p, Vec::Ones(2)))), 1e-15);
    EXPECT_LT(moment_condition_residual(ex.fields, act, md, p, Vec::Ones(1)), 1e-6);

    Eigen::MatrixXi bad(2, 2);
    bad << 1, 2, 2, 4;
    EXPECT_THROW(subtorus_restrict(ex.action, ex.moment, bad), Error);
    EXPECT_THROW(subtorus_restrict(ex.action, ex.moment, Eigen::MatrixXi::Ones(3, 1)), DimensionError);
}

TEST(Effectiveness, RankOfMomentDifferentials) {
    EXPECT_EQ(effectiveness_rank(*load("sphere_rotation", 16).manifold, load("sphere_rotation", 16).moment, 1), 1);
    const Example p = load("product_spheres_T2", 16);
    EXPECT_EQ(effectiveness_rank(*p.manifold, p.moment, 2), 2);
    // A redundant moment (z1, z1) has rank 1.
    MomentData dup = p.moment;
    dup.mu = [mu = p.moment.mu](const ChartPoint& q) { return Vec(Vec::Constant(2, mu(q)(0))); };
    EXPECT_EQ(effectiveness_rank(*p.manifold, dup, 2), 1);
}

TEST(FixedPoints, SpherePolesAndProductSpheres) {
    const Example s = load("sphere_rotation", 32);
    const FixedPointSet f = fixed_point_components(*s.manifold, s.action, s.moment);
    ASSERT_EQ(f.components.size(), 2u);
    std::vector<double> values;
    for (const auto& c : f.components) {
        EXPECT_EQ(c.members.size(), 1u);
        EXPECT_EQ(c.dimension, 0);
        values.push_back(c.value(0));
    }
    std::sort(values.begin(), values.end());
    EXPECT_DOUBLE_EQ(values[0], -1.0);
    EXPECT_DOUBLE_EQ(values[1], 1.0);

    const Example p = load("product_spheres_T2", 16);
    const auto [act, md] = direction_action(p.action, p.moment, Eigen::Vector2d(1.0, 0.0));
    const FixedPointSet g = fixed_point_components(*p.manifold, act, md);
    ASSERT_EQ(g.components.size(), 2u);
    const auto& second = dynamic_cast<const ProductManifold&>(*p.manifold).second();
    for (const auto& c : g.components) {
        EXPECT_EQ(c.dimension, 2);
        EXPECT_EQ(c.members.size(), second.size());
    }
    EXPECT_EQ(fixed_point_components(*p.manifold, p.action, p.moment).components.size(), 4u);
}

TEST(Equivariance, MomentIsInvariant) {
    for (const char* name : {"sphere_rotation", "product_spheres_T2", "twisted_sphere_torus"}) {
        const Example ex = load(name, 16);
        std::mt19937_64 rng(1);
        for (std::size_t i = 0; i < ex.manifold->size(); i += 97) {
            EXPECT_LT(equivariance_residual(ex.action, ex.moment, ex.manifold->point(i), rng), 1e-12) << name;
            Vec th = Vec::Constant(ex.action.rank, 0.7);
            EXPECT_LT(structure_invariance_residual(ex.action, ex.fields, ex.manifold->point(i), th), 1e-6) << name;
            EXPECT_LT(generator_commutator(ex.action, ex.manifold->point(i)), 1e-8) << name;
        }
    }
}
