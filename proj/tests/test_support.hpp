// Random fiber generators and small oracles shared by the test suites.
#pragma once

#include "gcmoment/fiber.hpp"

#include <random>

namespace gcmtest {

using namespace gcmoment;

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

inline Mat random_orthogonal(std::mt19937_64& rng, Eigen::Index d) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(rng, d, d));
    return qr.householderQ();
}

/// Invertible matrix with singular values in [0.5, 2].
inline Mat random_well_conditioned(std::mt19937_64& rng, Eigen::Index d) {
    std::uniform_real_distribution<double> s(0.5, 2.0);
    Vec sv(d);
    for (Eigen::Index i = 0; i < d; ++i) sv(i) = s(rng);
    return random_orthogonal(rng, d) * sv.asDiagonal() * random_orthogonal(rng, d);
}

inline Mat standard_complex(Eigen::Index d) {
    Mat j = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k + 1 < d; k += 2) {
        j(k + 1, k) = 1.0;
        j(k, k + 1) = -1.0;
    }
    return j;
}

inline Mat random_antisymmetric(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
    const Mat a = random_matrix(rng, d, d);
    return scale * 0.5 * (a - a.transpose());
}

/// Nondegenerate 2-form A^t J0 A.
inline Mat random_symplectic_form(std::mt19937_64& rng, Eigen::Index d) {
    const Mat a = random_well_conditioned(rng, d);
    return a.transpose() * standard_complex(d) * a;
}

inline Mat random_complex_structure(std::mt19937_64& rng, Eigen::Index d) {
    const Mat a = random_well_conditioned(rng, d);
    return a * standard_complex(d) * a.inverse();
}

inline Mat random_spd(std::mt19937_64& rng, Eigen::Index d) {
    const Mat a = random_well_conditioned(rng, d);
    return a.transpose() * a;
}

/// Symplectic, complex, or B-shifted structure, chosen by `kind`.
inline FiberStructure random_structure(std::mt19937_64& rng, Eigen::Index d, int kind) {
    switch (kind % 3) {
        case 0: return from_symplectic(flat(random_symplectic_form(rng, d)));
        case 1: return from_complex_structure(random_complex_structure(rng, d));
        default: {
            const FiberStructure base = (rng() % 2 == 0) ? from_symplectic(flat(random_symplectic_form(rng, d)))
                                                         : from_complex_structure(random_complex_structure(rng, d));
            return b_shift(base, flat(random_antisymmetric(rng, d, 0.5)));
        }
    }
}

}  // namespace gcmtest
