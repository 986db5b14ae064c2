// Sampled compact manifolds: chart coordinates, embeddings and neighbor graphs.
//
// Every sample lives in exactly one chart ("home chart"). Field evaluators are
// analytic functions of chart coordinates, so finite differences are taken in
// the home chart around a sample and never need neighboring samples.
#pragma once

#include "gcmoment/linalg.hpp"

#include <Eigen/Geometry>

#include <deque>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gcmoment {

struct ChartPoint {
    int chart = 0;
    Vec x;
};

class SampledManifold {
public:
    virtual ~SampledManifold() = default;

    [[nodiscard]] virtual int dim() const = 0;
    [[nodiscard]] virtual std::size_t size() const = 0;
    [[nodiscard]] virtual ChartPoint point(std::size_t i) const = 0;
    [[nodiscard]] virtual Vec embedding(std::size_t i) const = 0;
    virtual void neighbors(std::size_t i, std::vector<std::size_t>& out) const = 0;
    [[nodiscard]] virtual int chart_count() const = 0;

    /// True when the closed ball of radius `margin` around p (max-norm, chart
    /// coordinates) lies in the domain where chart `p.chart` is valid.
    [[nodiscard]] virtual bool in_domain(const ChartPoint& p, double margin) const = 0;

    /// The same point expressed in `chart`; periodic coordinates are unwrapped near `near`.
    [[nodiscard]] virtual ChartPoint to_chart(const ChartPoint& p, int chart, const Vec& near) const = 0;

    /// Graph edges that cross a periodic identification of a chart.
    [[nodiscard]] virtual std::vector<std::pair<std::size_t, std::size_t>> seam_edges() const = 0;

    [[nodiscard]] virtual std::string name() const = 0;

    /// Largest embedding distance between neighbors.
    [[nodiscard]] virtual double h_geom() const {
        double h = 0.0;
        std::vector<std::size_t> nb;
        for (std::size_t i = 0; i < size(); ++i) {
            const Vec e = embedding(i);
            neighbors(i, nb);
            for (std::size_t j : nb)
                if (j > i) h = std::max(h, (embedding(j) - e).norm());
        }
        return h;
    }
};

using ManifoldPtr = std::shared_ptr<const SampledManifold>;

/// Connected components of the subgraph induced by `member`; label -1 marks non-members.
struct ComponentLabels {
    std::vector<int> label;
    int count = 0;
};

inline ComponentLabels induced_components(const SampledManifold& m, const std::vector<char>& member) {
    ComponentLabels out;
    out.label.assign(m.size(), -1);
    std::vector<std::size_t> nb;
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (!member[s] || out.label[s] >= 0) continue;
        const int id = out.count++;
        out.label[s] = id;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            m.neighbors(i, nb);
            for (std::size_t j : nb) {
                if (member[j] && out.label[j] < 0) {
                    out.label[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
    return out;
}

inline bool is_connected(const SampledManifold& m) {
    return induced_components(m, std::vector<char>(m.size(), 1)).count == 1;
}

namespace detail {

inline double wrap_near(double value, double near, double period) {
    return value - period * std::round((value - near) / period);
}

/// Adjacency lists stored contiguously.
class AdjacencyTable {
public:
    explicit AdjacencyTable(const std::vector<std::vector<std::size_t>>& lists) {
        offsets_.reserve(lists.size() + 1);
        offsets_.push_back(0);
        for (const auto& l : lists) {
            std::vector<std::size_t> sorted = l;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            ids_.insert(ids_.end(), sorted.begin(), sorted.end());
            offsets_.push_back(ids_.size());
        }
    }
    AdjacencyTable() = default;

    void get(std::size_t i, std::vector<std::size_t>& out) const {
        out.assign(ids_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                   ids_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> ids_;
};

}  // namespace detail

/// Unit sphere sampled on latitude rings equally spaced in height.
///
/// Ring k sits at z = -1 + k/n (k = 0..2n, the end rings are the poles), so
/// the height function is sampled on a uniform grid of spacing 1/n. Charts:
/// 0 is the band (theta, z) for |z| <= 0.8, 1 and 2 are the north and south
/// caps with coordinates (x, y).
class SphereSampling final : public SampledManifold {
public:
    static constexpr int kBand = 0;
    static constexpr int kNorth = 1;
    static constexpr int kSouth = 2;
    static constexpr double kCapHeight = 0.8;

    /// `longitudes` scales ring sizes (ring size ~ longitudes * ring radius);
    /// 0 selects 4n, which makes the samples roughly equally spaced along rings.
    explicit SphereSampling(int n, int longitudes = 0, int min_ring = 6) : n_(n) {
        if (n < 1) throw Error("SphereSampling: resolution must be positive");
        const int lon = longitudes > 0 ? longitudes : 4 * n;
        std::vector<std::vector<std::size_t>> rings;
        for (int k = 0; k <= 2 * n; ++k) {
            const double z = -1.0 + static_cast<double>(k) / n;
            std::vector<std::size_t> ring;
            if (k == 0 || k == 2 * n) {
                ring.push_back(add({0.0, 0.0, z}, 0.0));
            } else {
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const int count = std::max(min_ring, static_cast<int>(std::lround(lon * r)));
                for (int j = 0; j < count; ++j) {
                    const double th = 2.0 * std::numbers::pi * j / count;
                    ring.push_back(add({r * std::cos(th), r * std::sin(th), z}, th));
                }
            }
            rings.push_back(std::move(ring));
        }
        std::vector<std::vector<std::size_t>> adj(xyz_.size());
        auto link = [&](std::size_t a, std::size_t b) {
            if (a == b) return;
            adj[a].push_back(b);
            adj[b].push_back(a);
        };
        for (const auto& ring : rings) {
            const std::size_t c = ring.size();
            if (c < 2) continue;
            for (std::size_t j = 0; j < c; ++j) {
                link(ring[j], ring[(j + 1) % c]);
                if (j + 1 == c && chart_[ring[j]] == kBand && chart_[ring[0]] == kBand)
                    seams_.emplace_back(ring[j], ring[0]);
            }
        }
        for (std::size_t k = 0; k + 1 < rings.size(); ++k) {
            const auto& lo = rings[k];
            const auto& hi = rings[k + 1];
            // Ring samples sit at angles 2 pi j / count, so the nearest one is a rounding.
            auto nearest = [&](const std::vector<std::size_t>& target, double th) {
                const auto c = static_cast<long>(target.size());
                long j = std::lround(th * static_cast<double>(c) / (2.0 * std::numbers::pi)) % c;
                if (j < 0) j += c;
                return target[static_cast<std::size_t>(j)];
            };
            if (lo.size() == 1 || hi.size() == 1) {
                for (std::size_t a : lo)
                    for (std::size_t b : hi) link(a, b);
                continue;
            }
            for (std::size_t a : lo) link(a, nearest(hi, theta_[a]));
            for (std::size_t b : hi) link(b, nearest(lo, theta_[b]));
        }
        adj_ = detail::AdjacencyTable(adj);
    }

    [[nodiscard]] int resolution() const { return n_; }
    [[nodiscard]] int dim() const override { return 2; }
    [[nodiscard]] std::size_t size() const override { return xyz_.size(); }
    [[nodiscard]] int chart_count() const override { return 3; }
    [[nodiscard]] std::string name() const override { return "S2"; }

    [[nodiscard]] ChartPoint point(std::size_t i) const override {
        const int c = chart_[i];
        if (c == kBand) return {c, Eigen::Vector2d(theta_[i], xyz_[i].z())};
        return {c, Eigen::Vector2d(xyz_[i].x(), xyz_[i].y())};
    }

    [[nodiscard]] Vec embedding(std::size_t i) const override { return xyz_[i]; }

    void neighbors(std::size_t i, std::vector<std::size_t>& out) const override { adj_.get(i, out); }

    [[nodiscard]] bool in_domain(const ChartPoint& p, double margin) const override {
        if (p.chart == kBand) return std::abs(p.x(1)) + margin < 1.0;
        const double r = std::hypot(std::abs(p.x(0)) + margin, std::abs(p.x(1)) + margin);
        return r < 1.0;
    }

    static Eigen::Vector3d to_xyz(const ChartPoint& p) {
        if (p.chart == kBand) {
            const double z = p.x(1);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            return {r * std::cos(p.x(0)), r * std::sin(p.x(0)), z};
        }
        const double s = std::sqrt(std::max(0.0, 1.0 - p.x.squaredNorm()));
        return {p.x(0), p.x(1), p.chart == kNorth ? s : -s};
    }

    static ChartPoint from_xyz(const Eigen::Vector3d& v, int chart, const Vec& near) {
        if (chart == kBand) {
            double th = std::atan2(v.y(), v.x());
            th = near.size() == 2 ? detail::wrap_near(th, near(0), 2.0 * std::numbers::pi)
                                  : detail::wrap_near(th, std::numbers::pi, 2.0 * std::numbers::pi);
            return {chart, Eigen::Vector2d(th, v.z())};
        }
        if ((chart == kNorth && v.z() < 0.0) || (chart == kSouth && v.z() > 0.0))
            throw ChartBoundaryError("SphereSampling: point outside the requested cap chart");
        return {chart, Eigen::Vector2d(v.x(), v.y())};
    }

    [[nodiscard]] ChartPoint to_chart(const ChartPoint& p, int chart, const Vec& near) const override {
        if (p.chart == chart && chart != kBand) return p;
        return from_xyz(to_xyz(p), chart, near);
    }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> seam_edges() const override { return seams_; }

private:
    std::size_t add(const Eigen::Vector3d& v, double theta) {
        xyz_.push_back(v);
        theta_.push_back(theta);
        chart_.push_back(v.z() > kCapHeight ? kNorth : (v.z() < -kCapHeight ? kSouth : kBand));
        return xyz_.size() - 1;
    }

    int n_;
    std::vector<Eigen::Vector3d> xyz_;
    std::vector<double> theta_;
    std::vector<int> chart_;
    std::vector<std::pair<std::size_t, std::size_t>> seams_;
    detail::AdjacencyTable adj_;
};

/// Flat torus R^k / (2 pi Z)^k on a regular grid with n points per circle.
class FlatTorus final : public SampledManifold {
public:
    FlatTorus(int k, int n) : k_(k), n_(n) {
        if (k < 1 || n < 3) throw Error("FlatTorus: need k >= 1 and n >= 3");
        size_ = 1;
        for (int a = 0; a < k; ++a) size_ *= static_cast<std::size_t>(n);
    }

    [[nodiscard]] int dim() const override { return k_; }
    [[nodiscard]] std::size_t size() const override { return size_; }
    [[nodiscard]] int chart_count() const override { return 1; }
    [[nodiscard]] std::string name() const override { return "T" + std::to_string(k_); }

    [[nodiscard]] std::vector<int> grid_index(std::size_t i) const {
        std::vector<int> g(static_cast<std::size_t>(k_));
        for (int a = k_ - 1; a >= 0; --a) {
            g[static_cast<std::size_t>(a)] = static_cast<int>(i % static_cast<std::size_t>(n_));
            i /= static_cast<std::size_t>(n_);
        }
        return g;
    }

    [[nodiscard]] std::size_t flat_index(const std::vector<int>& g) const {
        std::size_t i = 0;
        for (int a = 0; a < k_; ++a)
            i = i * static_cast<std::size_t>(n_) + static_cast<std::size_t>((g[static_cast<std::size_t>(a)] + n_) % n_);
        return i;
    }

    [[nodiscard]] ChartPoint point(std::size_t i) const override {
        const auto g = grid_index(i);
        Vec x(k_);
        for (int a = 0; a < k_; ++a) x(a) = 2.0 * std::numbers::pi * g[static_cast<std::size_t>(a)] / n_;
        return {0, x};
    }

    [[nodiscard]] Vec embedding(std::size_t i) const override {
        const Vec x = point(i).x;
        Vec e(2 * k_);
        for (int a = 0; a < k_; ++a) {
            e(2 * a) = std::cos(x(a));
            e(2 * a + 1) = std::sin(x(a));
        }
        return e;
    }

    void neighbors(std::size_t i, std::vector<std::size_t>& out) const override {
        out.clear();
        auto g = grid_index(i);
        for (int a = 0; a < k_; ++a) {
            for (int step : {-1, 1}) {
                auto h = g;
                h[static_cast<std::size_t>(a)] += step;
                out.push_back(flat_index(h));
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

    [[nodiscard]] bool in_domain(const ChartPoint&, double) const override { return true; }

    [[nodiscard]] ChartPoint to_chart(const ChartPoint& p, int, const Vec& near) const override {
        ChartPoint q = p;
        if (near.size() == k_)
            for (int a = 0; a < k_; ++a) q.x(a) = detail::wrap_near(p.x(a), near(a), 2.0 * std::numbers::pi);
        return q;
    }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> seam_edges() const override {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < size_; ++i) {
            auto g = grid_index(i);
            for (int a = 0; a < k_; ++a) {
                if (g[static_cast<std::size_t>(a)] != n_ - 1) continue;
                auto h = g;
                h[static_cast<std::size_t>(a)] = 0;
                out.emplace_back(i, flat_index(h));
            }
        }
        return out;
    }

private:
    int k_;
    int n_;
    std::size_t size_ = 0;
};

/// Regular grid on an open box of R^d; a single chart whose domain is given by a predicate.
class BoxGrid final : public SampledManifold {
public:
    using DomainPredicate = std::function<bool(const Vec&, double margin)>;

    BoxGrid(int d, int n, double lo, double hi, DomainPredicate domain = {})
        : d_(d), n_(n), lo_(lo), hi_(hi), domain_(std::move(domain)) {
        if (d < 1 || n < 2) throw Error("BoxGrid: need d >= 1 and n >= 2");
        size_ = 1;
        for (int a = 0; a < d; ++a) size_ *= static_cast<std::size_t>(n);
    }

    [[nodiscard]] int dim() const override { return d_; }
    [[nodiscard]] std::size_t size() const override { return size_; }
    [[nodiscard]] int chart_count() const override { return 1; }
    [[nodiscard]] std::string name() const override { return "box" + std::to_string(d_); }

    [[nodiscard]] ChartPoint point(std::size_t i) const override {
        Vec x(d_);
        for (int a = d_ - 1; a >= 0; --a) {
            const auto g = static_cast<int>(i % static_cast<std::size_t>(n_));
            i /= static_cast<std::size_t>(n_);
            x(a) = lo_ + (hi_ - lo_) * g / (n_ - 1);
        }
        return {0, x};
    }

    [[nodiscard]] Vec embedding(std::size_t i) const override { return point(i).x; }

    void neighbors(std::size_t i, std::vector<std::size_t>& out) const override {
        out.clear();
        std::size_t stride = 1;
        for (int a = d_ - 1; a >= 0; --a) {
            const auto g = static_cast<int>((i / stride) % static_cast<std::size_t>(n_));
            if (g > 0) out.push_back(i - stride);
            if (g + 1 < n_) out.push_back(i + stride);
            stride *= static_cast<std::size_t>(n_);
        }
        std::sort(out.begin(), out.end());
    }

    [[nodiscard]] bool in_domain(const ChartPoint& p, double margin) const override {
        return !domain_ || domain_(p.x, margin);
    }

    [[nodiscard]] ChartPoint to_chart(const ChartPoint& p, int, const Vec&) const override { return p; }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> seam_edges() const override { return {}; }

private:
    int d_;
    int n_;
    double lo_;
    double hi_;
    DomainPredicate domain_;
    std::size_t size_ = 0;
};

/// Cartesian product of two sampled manifolds, indexed lazily as i = i_a * |b| + i_b.
class ProductManifold final : public SampledManifold {
public:
    ProductManifold(ManifoldPtr a, ManifoldPtr b) : a_(std::move(a)), b_(std::move(b)) {}

    [[nodiscard]] const SampledManifold& first() const { return *a_; }
    [[nodiscard]] const SampledManifold& second() const { return *b_; }

    [[nodiscard]] int dim() const override { return a_->dim() + b_->dim(); }
    [[nodiscard]] std::size_t size() const override { return a_->size() * b_->size(); }
    [[nodiscard]] int chart_count() const override { return a_->chart_count() * b_->chart_count(); }
    [[nodiscard]] std::string name() const override { return a_->name() + "x" + b_->name(); }

    [[nodiscard]] std::pair<std::size_t, std::size_t> split_index(std::size_t i) const {
        return {i / b_->size(), i % b_->size()};
    }

    [[nodiscard]] std::pair<ChartPoint, ChartPoint> split(const ChartPoint& p) const {
        const int cb = b_->chart_count();
        return {ChartPoint{p.chart / cb, p.x.head(a_->dim())}, ChartPoint{p.chart % cb, p.x.tail(b_->dim())}};
    }

    [[nodiscard]] ChartPoint join(const ChartPoint& pa, const ChartPoint& pb) const {
        Vec x(dim());
        x << pa.x, pb.x;
        return {pa.chart * b_->chart_count() + pb.chart, x};
    }

    [[nodiscard]] ChartPoint point(std::size_t i) const override {
        const auto [ia, ib] = split_index(i);
        return join(a_->point(ia), b_->point(ib));
    }

    [[nodiscard]] Vec embedding(std::size_t i) const override {
        const auto [ia, ib] = split_index(i);
        const Vec ea = a_->embedding(ia);
        const Vec eb = b_->embedding(ib);
        Vec e(ea.size() + eb.size());
        e << ea, eb;
        return e;
    }

    void neighbors(std::size_t i, std::vector<std::size_t>& out) const override {
        const auto [ia, ib] = split_index(i);
        thread_local std::vector<std::size_t> tmp;
        out.clear();
        a_->neighbors(ia, tmp);
        for (std::size_t ja : tmp) out.push_back(ja * b_->size() + ib);
        b_->neighbors(ib, tmp);
        for (std::size_t jb : tmp) out.push_back(ia * b_->size() + jb);
        std::sort(out.begin(), out.end());
    }

    [[nodiscard]] bool in_domain(const ChartPoint& p, double margin) const override {
        const auto [pa, pb] = split(p);
        return a_->in_domain(pa, margin) && b_->in_domain(pb, margin);
    }

    [[nodiscard]] ChartPoint to_chart(const ChartPoint& p, int chart, const Vec& near) const override {
        const auto [pa, pb] = split(p);
        const int cb = b_->chart_count();
        const Vec na = near.size() == dim() ? Vec(near.head(a_->dim())) : Vec();
        const Vec nbv = near.size() == dim() ? Vec(near.tail(b_->dim())) : Vec();
        return join(a_->to_chart(pa, chart / cb, na), b_->to_chart(pb, chart % cb, nbv));
    }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> seam_edges() const override {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const std::size_t nb = b_->size();
        for (const auto& [u, v] : a_->seam_edges())
            for (std::size_t ib = 0; ib < nb; ++ib) out.emplace_back(u * nb + ib, v * nb + ib);
        for (const auto& [u, v] : b_->seam_edges())
            for (std::size_t ia = 0; ia < a_->size(); ++ia) out.emplace_back(ia * nb + u, ia * nb + v);
        return out;
    }

    /// Product edges move in one factor only, so the factor scales bound it exactly.
    [[nodiscard]] double h_geom() const override { return std::max(a_->h_geom(), b_->h_geom()); }

private:
    ManifoldPtr a_;
    ManifoldPtr b_;
};

/// CSV rows: id, chart, chart coordinates, embedding coordinates, space-separated neighbor ids.
inline void write_samples_csv(const SampledManifold& m, std::ostream& os) {
    const int d = m.dim();
    const Eigen::Index e = m.size() > 0 ? m.embedding(0).size() : 0;
    os << "id,chart";
    for (int a = 0; a < d; ++a) os << ",x" << a;
    for (Eigen::Index a = 0; a < e; ++a) os << ",e" << a;
    os << ",neighbors\n";
    std::vector<std::size_t> nb;
    os.precision(12);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const ChartPoint p = m.point(i);
        os << i << ',' << p.chart;
        for (int a = 0; a < d; ++a) os << ',' << p.x(a);
        const Vec emb = m.embedding(i);
        for (Eigen::Index a = 0; a < e; ++a) os << ',' << emb(a);
        m.neighbors(i, nb);
        os << ',';
        for (std::size_t k = 0; k < nb.size(); ++k) os << (k ? " " : "") << nb[k];
        os << '\n';
    }
}

}  // namespace gcmoment
