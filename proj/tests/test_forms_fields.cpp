#include "gcmoment/fields.hpp"

#include <gtest/gtest.h>

using namespace gcmoment;

namespace {

ChartPoint at(std::initializer_list<double> xs) {
    Vec x(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double v : xs) x(i++) = v;
    return {0, x};
}

}  // namespace

TEST(Form, BasisSignsAndInterior) {
    const Form w = Form::basis(3, {0, 1});
    EXPECT_DOUBLE_EQ(w.at({0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(w.at({1, 0}), -1.0);
    EXPECT_DOUBLE_EQ(w.at({0, 2}), 0.0);
    const Form v = Form::basis(3, {0, 1, 2});
    EXPECT_DOUBLE_EQ(v.at({2, 1, 0}), -1.0);
    EXPECT_DOUBLE_EQ(v.at({1, 2, 0}), 1.0);
    const Form i = w.interior(unit(3, 0));
    EXPECT_EQ(i.degree(), 1);
    EXPECT_LT(max_abs(Vec(i.as_vector() - unit(3, 1))), 1e-15);
    EXPECT_THROW(Form::scalar(1.0).interior(Vec()), DimensionError);
    EXPECT_THROW(w + v, DimensionError);
}

TEST(Form, EmbedShiftsIndices) {
    const Form e = embed_form(Form::basis(2, {0, 1}), 4, 2);
    EXPECT_DOUBLE_EQ(e.at({2, 3}), 1.0);
    EXPECT_DOUBLE_EQ(e.at({3, 2}), -1.0);
    EXPECT_DOUBLE_EQ(e.at({0, 1}), 0.0);
}

TEST(ExteriorDerivative, FunctionsAndForms) {
    // f = x0^2 x1: df = 2 x0 x1 dx0 + x0^2 dx1.
    const FormField f = [](const ChartPoint& p) { return Form::scalar(p.x(0) * p.x(0) * p.x(1)); };
    const ChartPoint p = at({0.3, -0.7});
    EXPECT_NEAR(fd_exterior_derivative(f, p).at({0}), 2 * 0.3 * -0.7, 1e-8);
    EXPECT_NEAR(fd_exterior_derivative(f, p).at({1}), 0.09, 1e-8);

    // d(x0 dx1) = dx0 ^ dx1.
    const FormField a = [](const ChartPoint& q) { return Form::covector(Vec(Eigen::Vector2d(0.0, q.x(0)))); };
    const Form da = fd_exterior_derivative(a, p);
    EXPECT_NEAR(da.at({0, 1}), 1.0, 1e-9);
    EXPECT_NEAR(da.at({1, 0}), -1.0, 1e-9);

    // d(x2 dx0 ^ dx1) = dx0 ^ dx1 ^ dx2.
    const FormField b = [](const ChartPoint& q) { return q.x(2) * Form::basis(3, {0, 1}); };
    const Form db = fd_exterior_derivative(b, at({0.1, 0.2, 0.3}));
    EXPECT_NEAR(db.at({0, 1, 2}), 1.0, 1e-9);
    EXPECT_NEAR(db.at({2, 0, 1}), 1.0, 1e-9);
}

TEST(ExteriorDerivative, SquareVanishes) {
    const FormField f = [](const ChartPoint& p) {
        return Form::scalar(std::sin(p.x(0)) * std::exp(p.x(1)) + p.x(2) * p.x(0));
    };
    const FormField df = [&](const ChartPoint& p) { return fd_exterior_derivative(f, p, 1e-3); };
    EXPECT_LT(fd_exterior_derivative(df, at({0.2, -0.1, 0.5}), 1e-3).max_abs(), 1e-6);
}

TEST(CourantBracket, VectorFieldsGiveLieBracket) {
    // [d/dx, x d/dy] = d/dy.
    using F = std::function<SplitElement(const ChartPoint&)>;
    const F x = [](const ChartPoint&) { return SplitElement(unit(2, 0), Vec::Zero(2)); };
    const F y = [](const ChartPoint& p) { return SplitElement(Vec(Eigen::Vector2d(0.0, p.x(0))), Vec::Zero(2)); };
    const SplitElement c = courant_bracket(x, y, {}, at({0.4, 0.9}));
    EXPECT_LT(max_abs(Vec(c.vec - unit(2, 1))), 1e-9);
    EXPECT_LT(max_abs(c.cov), 1e-9);
}

TEST(CourantBracket, VectorWithFormIsLieDerivativeCorrected) {
    // [d/dx, x dy] = L_X(x dy) - d(x dy(d/dx))/2 = dy.
    using F = std::function<SplitElement(const ChartPoint&)>;
    const F x = [](const ChartPoint&) { return SplitElement(unit(2, 0), Vec::Zero(2)); };
    const F eta = [](const ChartPoint& p) { return SplitElement(Vec::Zero(2), Vec(Eigen::Vector2d(0.0, p.x(0)))); };
    const SplitElement c = courant_bracket(x, eta, {}, at({0.4, 0.9}));
    EXPECT_LT(max_abs(c.vec), 1e-9);
    EXPECT_LT(max_abs(Vec(c.cov - unit(2, 1))), 1e-9);
}

TEST(CourantBracket, TwistTermAndAntisymmetry) {
    using F = std::function<SplitElement(const ChartPoint&)>;
    const F e0 = [](const ChartPoint&) { return SplitElement(unit(3, 0), Vec::Zero(3)); };
    const F e1 = [](const ChartPoint&) { return SplitElement(unit(3, 1), Vec::Zero(3)); };
    const FormField h = [](const ChartPoint&) { return Form::basis(3, {0, 1, 2}); };
    const SplitElement c = courant_bracket(e0, e1, h, at({0.0, 0.0, 0.0}));
    EXPECT_LT(max_abs(Vec(c.cov - unit(3, 2))), 1e-12);

    const F a = [](const ChartPoint& p) {
        return SplitElement(Vec(Eigen::Vector3d(p.x(1), p.x(0) * p.x(2), 1.0)),
                            Vec(Eigen::Vector3d(p.x(2), 0.5, p.x(0) * p.x(1))));
    };
    const F b = [](const ChartPoint& p) {
        return SplitElement(Vec(Eigen::Vector3d(std::sin(p.x(0)), p.x(2), p.x(1))),
                            Vec(Eigen::Vector3d(p.x(1) * p.x(1), p.x(0), 0.0)));
    };
    const ChartPoint p = at({0.3, -0.2, 0.7});
    const SplitElement ab = courant_bracket(a, b, h, p);
    const SplitElement ba = courant_bracket(b, a, h, p);
    EXPECT_LT(max_abs(Vec(ab.stacked() + ba.stacked())), 1e-8);
}

TEST(Integrability, ConstantStructuresAreIntegrable) {
    const StructureField jj = [](const ChartPoint&) {
        Mat j(2, 2);
        j << 0, -1, 1, 0;
        return from_complex_structure(j);
    };
    EXPECT_LT(integrability_residual(jj, {}, at({0.1, 0.2})).residual, 1e-12);
}

TEST(Integrability, ClosedBShiftStaysIntegrable) {
    // On R^2 every 2-form is closed.
    const StructureField j = [](const ChartPoint& p) {
        Mat w(2, 2), b(2, 2);
        w << 0, 1, -1, 0;
        const double f = std::sin(p.x(0)) + p.x(1) * p.x(1);
        b << 0, f, -f, 0;
        return b_shift(from_symplectic(flat(w)), flat(b));
    };
    EXPECT_LT(integrability_residual(j, {}, at({0.3, 0.4})).residual, 1e-8);
}

TEST(Integrability, NonClosedFormIsDetected) {
    const StructureField j = [](const ChartPoint& p) {
        Mat w = Mat::Zero(4, 4);
        w(0, 1) = 1.0, w(1, 0) = -1.0;
        w(2, 3) = 1.0 + p.x(0), w(3, 2) = -(1.0 + p.x(0));
        return from_symplectic(flat(w));
    };
    EXPECT_GT(integrability_residual(j, {}, at({0.1, 0.1, 0.1, 0.1})).residual, 1e-2);
}

TEST(Integrability, NonClosedBShiftNeedsMinusDbTwist) {
    // b = x0 dx2 ^ dx3 on R^4, db = dx0 ^ dx2 ^ dx3.
    const StructureField j = [](const ChartPoint& p) {
        Mat w = Mat::Zero(4, 4), b = Mat::Zero(4, 4);
        w(0, 1) = 1.0, w(1, 0) = -1.0, w(2, 3) = 1.0, w(3, 2) = -1.0;
        b(2, 3) = p.x(0), b(3, 2) = -p.x(0);
        return b_shift(from_symplectic(flat(w)), flat(b));
    };
    const ChartPoint p = at({0.2, 0.1, -0.3, 0.4});
    const FormField minus_db = [](const ChartPoint&) { return -1.0 * Form::basis(4, {0, 2, 3}); };
    const FormField plus_db = [](const ChartPoint&) { return Form::basis(4, {0, 2, 3}); };
    EXPECT_LT(integrability_residual(j, minus_db, p).residual, 1e-8);
    EXPECT_GT(integrability_residual(j, plus_db, p).residual, 1e-2);
    EXPECT_GT(integrability_residual(j, {}, p).residual, 1e-2);
}

TEST(Stencil, LeavingTheChartThrows) {
    const BoxGrid box(2, 5, -1.0, 1.0, [](const Vec& x, double margin) { return x(0) - margin > -1.0; });
    const ScalarField f = [](const ChartPoint& p) { return p.x(0); };
    EXPECT_THROW(fd_gradient(f, at({-1.0 + 1e-5, 0.0}), 1e-4, &box), ChartBoundaryError);
    EXPECT_NO_THROW(fd_gradient(f, at({0.0, 0.0}), 1e-4, &box));
}
