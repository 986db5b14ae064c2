// Values of differential forms at a point, stored as full antisymmetric tensors.
#pragma once

#include "gcmoment/linalg.hpp"

#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

namespace gcmoment {

/// A k-form value on R^d. Components are stored for every index tuple, so
/// w(e_i, e_j) is at(i, j) and dx^0 ^ dx^1 has at(0, 1) = 1, at(1, 0) = -1.
class Form {
public:
    Form() = default;
    Form(int degree, int dim)
        : degree_(degree), dim_(dim), c_(static_cast<std::size_t>(ipow(dim, degree)), 0.0) {
        if (degree < 0 || dim < 0) throw DimensionError("Form: negative degree or dimension");
    }

    static Form scalar(double v) {
        Form f(0, 0);
        f.c_[0] = v;
        return f;
    }

    static Form covector(const Vec& v) {
        Form f(1, static_cast<int>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) f.c_[static_cast<std::size_t>(i)] = v(i);
        return f;
    }

    /// 2-form with components m(i, j); m must be antisymmetric.
    static Form from_matrix(const Mat& m) {
        const int d = static_cast<int>(m.rows());
        Form f(2, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) f.c_[static_cast<std::size_t>(i * d + j)] = m(i, j);
        return f;
    }

    /// dx^{i_1} ^ ... ^ dx^{i_k}.
    static Form basis(int dim, std::initializer_list<int> idx) {
        std::vector<int> ids(idx);
        Form f(static_cast<int>(ids.size()), dim);
        std::vector<int> perm(ids.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<int> tuple(ids.size());
            for (std::size_t a = 0; a < ids.size(); ++a) tuple[a] = ids[static_cast<std::size_t>(perm[a])];
            f.at(tuple) += permutation_sign(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return f;
    }

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const std::vector<double>& components() const { return c_; }

    double& at(std::span<const int> idx) { return c_[offset(idx)]; }
    [[nodiscard]] double at(std::span<const int> idx) const { return c_[offset(idx)]; }
    double& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
    [[nodiscard]] double at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }

    [[nodiscard]] Vec as_vector() const {
        if (degree_ != 1) throw DimensionError("Form::as_vector: not a 1-form");
        return Eigen::Map<const Vec>(c_.data(), dim_);
    }

    [[nodiscard]] Mat as_matrix() const {
        if (degree_ != 2) throw DimensionError("Form::as_matrix: not a 2-form");
        Mat m(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = c_[static_cast<std::size_t>(i * dim_ + j)];
        return m;
    }

    /// i_X w, contracting the first slot.
    [[nodiscard]] Form interior(const Vec& x) const {
        if (degree_ == 0) throw DimensionError("Form::interior: degree 0");
        if (x.size() != dim_) throw DimensionError("Form::interior: vector has wrong dimension");
        Form out(degree_ - 1, dim_);
        const std::size_t stride = out.c_.size();
        for (int i = 0; i < dim_; ++i) {
            const double xi = x(i);
            if (xi == 0.0) continue;
            const std::size_t base = static_cast<std::size_t>(i) * stride;
            for (std::size_t r = 0; r < stride; ++r) out.c_[r] += xi * c_[base + r];
        }
        return out;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    Form& operator+=(const Form& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Form& operator-=(const Form& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Form& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(double s, Form a) { return a *= s; }

private:
    static long ipow(int base, int e) {
        long r = 1;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    }

    static double permutation_sign(const std::vector<int>& perm) {
        int inversions = 0;
        for (std::size_t a = 0; a < perm.size(); ++a)
            for (std::size_t b = a + 1; b < perm.size(); ++b)
                if (perm[a] > perm[b]) ++inversions;
        return inversions % 2 == 0 ? 1.0 : -1.0;
    }

    [[nodiscard]] std::size_t offset(std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) != degree_) throw DimensionError("Form: wrong number of indices");
        std::size_t off = 0;
        for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
        return off;
    }

    void check_same(const Form& o) const {
        if (o.degree_ != degree_ || o.dim_ != dim_) throw DimensionError("Form: degree or dimension mismatch");
    }

    int degree_ = 0;
    int dim_ = 0;
    std::vector<double> c_ = std::vector<double>(1, 0.0);
};

/// A form on R^a viewed on R^total_dim, its coordinates starting at `offset`.
inline Form embed_form(const Form& f, int total_dim, int offset) {
    Form out(f.degree(), total_dim);
    const int k = f.degree();
    std::vector<int> src(static_cast<std::size_t>(k)), dst(static_cast<std::size_t>(k));
    const auto& comps = f.components();
    for (std::size_t flat_idx = 0; flat_idx < comps.size(); ++flat_idx) {
        if (comps[flat_idx] == 0.0) continue;
        std::size_t rem = flat_idx;
        for (int a = k - 1; a >= 0; --a) {
            src[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(f.dim()));
            rem /= static_cast<std::size_t>(f.dim());
        }
        for (int a = 0; a < k; ++a) dst[static_cast<std::size_t>(a)] = src[static_cast<std::size_t>(a)] + offset;
        out.at(dst) = comps[flat_idx];
    }
    return out;
}

}  // namespace gcmoment
