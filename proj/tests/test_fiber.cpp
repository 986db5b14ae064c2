#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace gcmoment;
using namespace gcmtest;

namespace {

Mat area_form_r2() {
    Mat w(2, 2);
    w << 0.0, 1.0, -1.0, 0.0;
    return w;
}

/// Direct sum of structures on V1 + V2 in the stacked basis (V1, V2, V1*, V2*).
Mat direct_sum(const Mat& a, const Mat& b) {
    const Eigen::Index p = a.rows() / 2, q = b.rows() / 2, d = p + q;
    std::vector<Eigen::Index> ia, ib;
    for (Eigen::Index i = 0; i < p; ++i) ia.push_back(i);
    for (Eigen::Index i = 0; i < p; ++i) ia.push_back(d + i);
    for (Eigen::Index i = 0; i < q; ++i) ib.push_back(p + i);
    for (Eigen::Index i = 0; i < q; ++i) ib.push_back(d + p + i);
    Mat out = Mat::Zero(2 * d, 2 * d);
    for (std::size_t r = 0; r < ia.size(); ++r)
        for (std::size_t c = 0; c < ia.size(); ++c) out(ia[r], ia[c]) = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < ib.size(); ++r)
        for (std::size_t c = 0; c < ib.size(); ++c) out(ib[r], ib[c]) = b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return out;
}

}  // namespace

TEST(Pairing, NaturalPairingOfBasisElements) {
    SplitElement x(unit(2, 0), Vec::Zero(2));
    SplitElement dx(Vec::Zero(2), unit(2, 0));
    SplitElement dy(Vec::Zero(2), unit(2, 1));
    EXPECT_DOUBLE_EQ(pairing(x, dx), 0.5);
    EXPECT_DOUBLE_EQ(pairing(x, dy), 0.0);
    EXPECT_DOUBLE_EQ(pairing(x, x), 0.0);
    EXPECT_THROW(SplitElement(Vec::Zero(2), Vec::Zero(3)), DimensionError);
}

TEST(FromSymplectic, AreaFormMapsDxToDy) {
    // i_{d/dx}(dx ^ dy) = dy, so J sends (e_x, 0) to (0, dy).
    const FiberStructure j = from_symplectic(flat(area_form_r2()));
    Mat expected(4, 4);
    expected << 0, 0, 0, -1,
                0, 0, 1, 0,
                0, -1, 0, 0,
                1, 0, 0, 0;
    EXPECT_LT(max_abs(Mat(j.matrix() - expected)), 1e-15);
    EXPECT_TRUE(is_generalized_structure(j).ok);
    EXPECT_EQ(type_of(j), 0);
}

TEST(FromComplex, StandardStructureBlocks) {
    const Mat js = standard_complex(2);
    const FiberStructure j = from_complex_structure(js);
    EXPECT_LT(max_abs(Mat(j.matrix().topLeftCorner(2, 2) - js)), 1e-15);
    EXPECT_LT(max_abs(Mat(j.matrix().bottomRightCorner(2, 2) + js.transpose())), 1e-15);
    EXPECT_TRUE(is_generalized_structure(j).ok);
    EXPECT_EQ(type_of(j), 1);
}

TEST(Type, DirectSumOfComplexAndSymplectic) {
    const Mat jc = from_complex_structure(standard_complex(2)).matrix();
    const Mat jw = from_symplectic(flat(area_form_r2())).matrix();
    const FiberStructure mixed(direct_sum(jc, jw));
    EXPECT_TRUE(is_generalized_structure(mixed).ok);
    EXPECT_EQ(type_of(mixed), 1);
    EXPECT_EQ(type_of(FiberStructure(direct_sum(jc, jc))), 2);
    EXPECT_EQ(type_of(FiberStructure(direct_sum(jw, jw))), 0);
}

TEST(Axioms, RejectsNonStructures) {
    EXPECT_FALSE(is_generalized_structure(FiberStructure(identity(4))).ok);
    // Squares to -1 but is not orthogonal for the pairing.
    Mat j = Mat::Zero(4, 4);
    j.topLeftCorner(2, 2) = standard_complex(2);
    j.bottomRightCorner(2, 2) = -standard_complex(2);
    const StructureCheck c = is_generalized_structure(FiberStructure(j));
    EXPECT_LT(c.square_residual, 1e-15);
    EXPECT_GT(c.pairing_residual, 0.1);
    EXPECT_THROW(is_generalized_structure(FiberStructure(identity(3))), DimensionError);
}

TEST(BShift, ZeroIsIdentityAndShearPreservesPairing) {
    std::mt19937_64 rng(7);
    const FiberStructure j = from_symplectic(flat(random_symplectic_form(rng, 4)));
    EXPECT_LT(max_abs(Mat(b_shift(j, Mat::Zero(4, 4)).matrix() - j.matrix())), 1e-15);
    const Mat e = shear(flat(random_antisymmetric(rng, 4)));
    const Mat q = pairing_matrix(4);
    EXPECT_LT(max_abs(Mat(e.transpose() * q * e - q)), 1e-14);
    // e^B e^{-B} = 1.
    const Mat b = flat(random_antisymmetric(rng, 4));
    EXPECT_LT(max_abs(Mat(shear(b) * shear(-b) - identity(8))), 1e-14);
}

TEST(Eigenspace, MaximalIsotropicOfHalfDimension) {
    std::mt19937_64 rng(11);
    for (int kind = 0; kind < 3; ++kind) {
        const FiberStructure j = random_structure(rng, 4, kind);
        const CMat l = eigenspace(j).basis;
        ASSERT_EQ(l.cols(), 4);
        for (Eigen::Index a = 0; a < 4; ++a)
            for (Eigen::Index b = 0; b < 4; ++b) EXPECT_LT(std::abs(pairing_stacked(l.col(a), l.col(b))), 1e-12);
        EXPECT_LT(max_abs(CMat(j.matrix().cast<cplx>() * l - kI * l)), 1e-12);
        const CMat p = eigen_projector(j);
        EXPECT_LT(max_abs(CMat(p * p - p)), 1e-12);
    }
}

TEST(CompatibleStructure, KaehlerFiberGivesComplexPartner) {
    // For omega = g j the partner of J_omega is J_j with j = g^-1 omega-flat,
    // and -J J' is the generalized metric of g.
    Mat g(2, 2);
    g << 2.0, 0.0, 0.0, 0.5;
    const Mat f = flat(area_form_r2());
    const FiberStructure jw = from_symplectic(f);
    const FiberStructure jp = compatible_structure(jw, g);
    const Mat expected = from_complex_structure(g.inverse() * f).matrix();
    EXPECT_LT(max_abs(Mat(jp.matrix() - expected)), 1e-12);
    EXPECT_LT(max_abs(Mat(-jw.matrix() * jp.matrix() - induced_generalized_metric(g))), 1e-12);
}

TEST(CompatibleStructure, RejectsBadMetric) {
    const FiberStructure jw = from_symplectic(flat(area_form_r2()));
    Mat g(2, 2);
    g << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(compatible_structure(jw, g), Error);
    EXPECT_THROW(compatible_structure(jw, identity(3)), DimensionError);
}

TEST(CompatibleStructure, PropertyOnRandomFibers) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 300; ++t) {
        const Eigen::Index d = 2 * (1 + t % 3);
        const FiberStructure j = random_structure(rng, d, t);
        const FiberStructure jp = compatible_structure(j, random_spd(rng, d));
        EXPECT_TRUE(is_generalized_structure(jp, 1e-10).ok);
        EXPECT_LT(max_abs(Mat(j.matrix() * jp.matrix() - jp.matrix() * j.matrix())), 1e-10);
        EXPECT_GT(metric_min_eigenvalue(-j.matrix() * jp.matrix()), 0.0);
    }
}

TEST(Gualtieri, KaehlerDecomposition) {
    Mat g(2, 2);
    g << 2.0, 0.0, 0.0, 0.5;
    const Mat f = flat(area_form_r2());
    const FiberStructure jw = from_symplectic(f);
    const GualtieriData q = gualtieri_decompose(jw, compatible_structure(jw, g));
    EXPECT_LT(max_abs(Mat(q.g - g)), 1e-12);
    EXPECT_LT(max_abs(q.b), 1e-12);
    EXPECT_LT(max_abs(Mat(q.j_plus - g.inverse() * f)), 1e-12);
    EXPECT_LT(max_abs(Mat(q.j_minus + g.inverse() * f)), 1e-12);
}

TEST(Gualtieri, BShiftMovesOnlyB) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const Mat b = flat(random_antisymmetric(rng, 4));
        const FiberStructure j = random_structure(rng, 4, t);
        const FiberStructure jp = compatible_structure(j, random_spd(rng, 4));
        const GualtieriData q0 = gualtieri_decompose(j, jp);
        const GualtieriData q = gualtieri_decompose(b_shift(j, b), b_shift(jp, b));
        EXPECT_LT(max_abs(Mat(q.b - q0.b - b)), 1e-10);
        EXPECT_LT(max_abs(Mat(q.g - q0.g)), 1e-10);
        EXPECT_LT(max_abs(Mat(q.j_plus - q0.j_plus)), 1e-10);
    }
}

TEST(Gualtieri, RoundTripOnRandomPairs) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index d = 2 * (1 + t % 3);
        const FiberStructure j1 = random_structure(rng, d, t);
        const FiberStructure j2 = compatible_structure(j1, random_spd(rng, d));
        const auto [r1, r2] = gualtieri_reconstruct(gualtieri_decompose(j1, j2));
        EXPECT_LT(max_abs(Mat(r1.matrix() - j1.matrix())), 1e-9);
        EXPECT_LT(max_abs(Mat(r2.matrix() - j2.matrix())), 1e-9);
    }
}

TEST(Gualtieri, RejectsNonCommutingPair) {
    std::mt19937_64 rng(3);
    const FiberStructure a = from_symplectic(flat(random_symplectic_form(rng, 2)));
    const FiberStructure b = from_complex_structure(random_complex_structure(rng, 2));
    EXPECT_THROW(gualtieri_decompose(a, b), Error);
    // J paired with itself commutes but -J J = 1 is not a positive metric.
    EXPECT_THROW(gualtieri_decompose(a, a), Error);
}

TEST(Axioms, ThousandRandomFibers) {
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Index d = 2 * (1 + t % 3);
        const FiberStructure j = random_structure(rng, d, t);
        const StructureCheck c = is_generalized_structure(j, 1e-10);
        ASSERT_TRUE(c.ok) << "trial " << t << " square " << c.square_residual << " pairing " << c.pairing_residual;
    }
}
