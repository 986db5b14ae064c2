// Moment images: sampled clouds, convex hulls in dimension <= 3, rasterized
// convexity deficiency, hull vertices against fixed-point images, and
// connectivity of thickened level sets.
#pragma once

#include "gcmoment/actions.hpp"

#include <array>
#include <map>
#include <set>

namespace gcmoment {

struct MomentCloud {
    int m = 0;
    std::vector<Vec> values;  // ordered by sample id
    Vec lo, hi;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

inline MomentCloud make_cloud(std::vector<Vec> values) {
    MomentCloud c;
    if (values.empty()) return c;
    c.m = static_cast<int>(values[0].size());
    c.lo = c.hi = values[0];
    for (const auto& v : values) {
        if (v.size() != c.m) throw DimensionError("make_cloud: inconsistent value dimension");
        if (!v.allFinite()) throw Error("make_cloud: non-finite moment value");
        c.lo = c.lo.cwiseMin(v);
        c.hi = c.hi.cwiseMax(v);
    }
    c.values = std::move(values);
    return c;
}

inline MomentCloud sample_moment_image(const SampledManifold& m, const MomentData& md, int jobs = 1) {
    std::vector<Vec> values(m.size());
    parallel_for(m.size(), jobs, [&](std::size_t i) {
        try {
            values[i] = md.mu(m.point(i));
        } catch (const std::exception& e) {
            throw Error("sample_moment_image: evaluation failed at sample " + std::to_string(i) + ": " + e.what());
        }
    });
    return make_cloud(std::move(values));
}

/// Convex hull of a point set in R^m, m <= 3. Degenerate inputs yield a hull of
/// lower affine dimension k, stored in coordinates of an orthonormal basis of
/// the affine span.
struct Polytope {
    int m = 0;
    int affine_dim = 0;            // k
    Vec origin;                    // R^m
    Mat basis;                     // m x k, orthonormal columns
    std::vector<Vec> vertices;     // R^m, sorted lexicographically
    std::vector<Vec> local;        // R^k hull vertices; for k = 2 in counterclockwise order
    std::vector<std::array<int, 3>> facets;  // k = 3: outward oriented triangles into `local`
    std::vector<Vec> normals;      // k = 3: outward unit normals
    std::vector<double> offsets;   // k = 3: normal . x <= offset

    [[nodiscard]] bool degenerate() const { return affine_dim < m; }

    /// Distance-style violation of membership: 0 inside, positive outside.
    [[nodiscard]] double excess(const Vec& p) const {
        const Vec rel = p - origin;
        const Vec y = basis.transpose() * rel;
        const double off_span = (rel - basis * y).norm();
        double inside = 0.0;
        if (affine_dim == 0) {
            inside = 0.0;
        } else if (affine_dim == 1) {
            inside = std::max({0.0, local[0](0) - y(0), y(0) - local[1](0)});
        } else if (affine_dim == 2) {
            const std::size_t n = local.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Vec& a = local[i];
                const Vec& b = local[(i + 1) % n];
                const Eigen::Vector2d e(b(0) - a(0), b(1) - a(1));
                const double len = e.norm();
                if (len == 0.0) continue;
                const double cross = (e(0) * (y(1) - a(1)) - e(1) * (y(0) - a(0))) / len;
                inside = std::max(inside, -cross);
            }
        } else {
            for (std::size_t f = 0; f < normals.size(); ++f)
                inside = std::max(inside, normals[f].dot(y) - offsets[f]);
        }
        return std::max(off_span, inside);
    }

    [[nodiscard]] bool contains(const Vec& p, double tol) const { return excess(p) <= tol; }
};

namespace detail {

inline bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

inline double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

/// Andrew's monotone chain; collinear points are dropped.
inline std::vector<Vec> monotone_chain(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return a == b; }), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

struct Hull3 {
    std::vector<std::array<int, 3>> faces;
};

/// Incremental 3-d hull over points in general position (affine dimension 3).
inline Hull3 incremental_hull3(const std::vector<Vec>& pts, double eps) {
    const int n = static_cast<int>(pts.size());
    auto p3 = [&](int i) { return Eigen::Vector3d(pts[static_cast<std::size_t>(i)].head<3>()); };
    // Initial tetrahedron from extreme points.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (lex_less(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i0)])) i0 = i;
    int i1 = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = (p3(i) - p3(i0)).norm();
        if (d > best) best = d, i1 = i;
    }
    int i2 = -1;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = (p3(i1) - p3(i0)).cross(p3(i) - p3(i0)).norm();
        if (d > best) best = d, i2 = i;
    }
    int i3 = -1;
    best = -1.0;
    const Eigen::Vector3d nrm = (p3(i1) - p3(i0)).cross(p3(i2) - p3(i0));
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(nrm.dot(p3(i) - p3(i0)));
        if (d > best) best = d, i3 = i;
    }
    Hull3 h;
    auto orient = [&](std::array<int, 3> f, const Eigen::Vector3d& inside) {
        const Eigen::Vector3d fn = (p3(f[1]) - p3(f[0])).cross(p3(f[2]) - p3(f[0]));
        if (fn.dot(inside - p3(f[0])) > 0.0) std::swap(f[1], f[2]);
        return f;
    };
    const Eigen::Vector3d centroid = (p3(i0) + p3(i1) + p3(i2) + p3(i3)) / 4.0;
    h.faces = {orient({i0, i1, i2}, centroid), orient({i0, i1, i3}, centroid), orient({i0, i2, i3}, centroid),
               orient({i1, i2, i3}, centroid)};
    auto visible = [&](const std::array<int, 3>& f, int p) {
        const Eigen::Vector3d fn = (p3(f[1]) - p3(f[0])).cross(p3(f[2]) - p3(f[0]));
        return fn.dot(p3(p) - p3(f[0])) > eps * std::max(1.0, fn.norm());
    };
    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<char> vis(h.faces.size());
        bool any = false;
        for (std::size_t f = 0; f < h.faces.size(); ++f) any |= (vis[f] = visible(h.faces[f], p)) != 0;
        if (!any) continue;
        // Horizon: directed edges of visible faces whose reverse is not visible.
        std::set<std::pair<int, int>> vis_edges;
        for (std::size_t f = 0; f < h.faces.size(); ++f)
            if (vis[f])
                for (int e = 0; e < 3; ++e) vis_edges.emplace(h.faces[f][e], h.faces[f][(e + 1) % 3]);
        std::vector<std::array<int, 3>> next;
        for (std::size_t f = 0; f < h.faces.size(); ++f)
            if (!vis[f]) next.push_back(h.faces[f]);
        for (const auto& [a, b] : vis_edges)
            if (!vis_edges.count({b, a})) next.push_back({a, b, p});
        h.faces = std::move(next);
    }
    return h;
}

}  // namespace detail

inline Polytope convex_hull(const std::vector<Vec>& points) {
    if (points.empty()) throw Error("convex_hull: empty point set");
    Polytope poly;
    poly.m = static_cast<int>(points[0].size());
    if (poly.m < 1 || poly.m > 3) throw DimensionError("convex_hull: only dimensions 1 to 3 are supported");

    Vec mean = Vec::Zero(poly.m);
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Mat cov = Mat::Zero(poly.m, poly.m);
    double scale = 0.0;
    for (const auto& p : points) {
        cov += (p - mean) * (p - mean).transpose();
        scale = std::max(scale, max_abs(Vec(p - mean)));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(cov / static_cast<double>(points.size()));
    const Vec ev = es.eigenvalues();
    const double cut = std::pow(1e-9 * std::max(scale, 1e-300), 2);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
        if (ev(i) > cut && scale > 0.0) keep.push_back(i);
    poly.affine_dim = static_cast<int>(keep.size());
    poly.origin = mean;
    poly.basis.resize(poly.m, poly.affine_dim);
    for (int j = 0; j < poly.affine_dim; ++j) poly.basis.col(j) = es.eigenvectors().col(keep[static_cast<std::size_t>(j)]);
    if (poly.affine_dim == poly.m) {
        poly.basis = identity(poly.m);
        poly.origin = Vec::Zero(poly.m);
    }

    std::vector<Vec> local(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) local[i] = poly.basis.transpose() * (points[i] - poly.origin);

    if (poly.affine_dim == 0) {
        poly.local = {Vec::Zero(0)};
    } else if (poly.affine_dim == 1) {
        double lo = local[0](0), hi = lo;
        for (const auto& y : local) lo = std::min(lo, y(0)), hi = std::max(hi, y(0));
        poly.local = {Vec::Constant(1, lo), Vec::Constant(1, hi)};
    } else if (poly.affine_dim == 2) {
        poly.local = detail::monotone_chain(local);
    } else {
        const auto h3 = detail::incremental_hull3(local, 1e-12 * std::max(scale, 1e-300));
        std::map<int, int> remap;
        for (const auto& f : h3.faces)
            for (int v : f)
                if (!remap.count(v)) remap.emplace(v, 0);
        int next = 0;
        for (auto& [orig, idx] : remap) {
            idx = next++;
            poly.local.push_back(local[static_cast<std::size_t>(orig)]);
        }
        for (const auto& f : h3.faces) {
            const std::array<int, 3> g{remap[f[0]], remap[f[1]], remap[f[2]]};
            const Eigen::Vector3d a = poly.local[static_cast<std::size_t>(g[0])].head<3>();
            const Eigen::Vector3d b = poly.local[static_cast<std::size_t>(g[1])].head<3>();
            const Eigen::Vector3d c = poly.local[static_cast<std::size_t>(g[2])].head<3>();
            Eigen::Vector3d nrm = (b - a).cross(c - a);
            if (nrm.norm() == 0.0) continue;
            nrm.normalize();
            poly.facets.push_back(g);
            poly.normals.emplace_back(Vec(nrm));
            poly.offsets.push_back(nrm.dot(a));
        }
    }
    for (const auto& y : poly.local) poly.vertices.emplace_back(poly.origin + poly.basis * y);
    if (poly.affine_dim == 0) poly.vertices = {points[0]};
    std::sort(poly.vertices.begin(), poly.vertices.end(), detail::lex_less);
    return poly;
}

inline Polytope convex_hull(const MomentCloud& cloud) { return convex_hull(cloud.values); }

/// Fraction of hull-interior raster cells containing no cloud point (m = 1, 2).
inline double convexity_deficiency(const MomentCloud& cloud, int resolution = 100) {
    if (cloud.size() == 0) throw Error("convexity_deficiency: empty cloud");
    if (cloud.m > 2) throw DimensionError("convexity_deficiency: only m = 1, 2 are supported");
    if (resolution < 1) throw Error("convexity_deficiency: resolution must be positive");
    const Vec width = cloud.hi - cloud.lo;
    if (max_abs(width) == 0.0) return 0.0;
    const int r = resolution;
    const int cells_y = cloud.m == 2 ? r : 1;
    auto cell_of = [&](double v, int a) {
        if (width(a) == 0.0) return 0;
        return std::clamp(static_cast<int>((v - cloud.lo(a)) / width(a) * r), 0, r - 1);
    };
    std::vector<char> hit(static_cast<std::size_t>(r * cells_y), 0);
    for (const auto& v : cloud.values) {
        const int cx = cell_of(v(0), 0);
        const int cy = cloud.m == 2 ? cell_of(v(1), 1) : 0;
        hit[static_cast<std::size_t>(cy * r + cx)] = 1;
    }
    if (cloud.m == 1) {
        const auto empty = std::count(hit.begin(), hit.end(), 0);
        return static_cast<double>(empty) / r;
    }
    const Polytope hull = convex_hull(cloud);
    long interior = 0, empty = 0;
    for (int cy = 0; cy < r; ++cy)
        for (int cx = 0; cx < r; ++cx) {
            Vec c(2);
            c << cloud.lo(0) + (cx + 0.5) * width(0) / r, cloud.lo(1) + (cy + 0.5) * width(1) / r;
            if (!hull.contains(c, 0.0)) continue;
            ++interior;
            if (!hit[static_cast<std::size_t>(cy * r + cx)]) ++empty;
        }
    return interior == 0 ? 0.0 : static_cast<double>(empty) / static_cast<double>(interior);
}

/// Largest |mu(p) - mu(q)| / |embedding(p) - embedding(q)| over graph edges.
inline double moment_lipschitz(const SampledManifold& m, const MomentCloud& cloud, int jobs = 1) {
    std::vector<double> worst(m.size(), 0.0);
    parallel_for(m.size(), jobs, [&](std::size_t i) {
        std::vector<std::size_t> nb;
        m.neighbors(i, nb);
        const Vec e = m.embedding(i);
        for (std::size_t j : nb) {
            const double dist = (m.embedding(j) - e).norm();
            if (dist > 0.0) worst[i] = std::max(worst[i], max_abs(Vec(cloud.values[j] - cloud.values[i])) / dist);
        }
    });
    return *std::max_element(worst.begin(), worst.end());
}

/// Twice the largest change of mu across a graph edge.
inline double default_level_eps(const SampledManifold& m, const MomentCloud& cloud, int jobs = 1) {
    std::vector<double> worst(m.size(), 0.0);
    parallel_for(m.size(), jobs, [&](std::size_t i) {
        std::vector<std::size_t> nb;
        m.neighbors(i, nb);
        for (std::size_t j : nb) worst[i] = std::max(worst[i], max_abs(Vec(cloud.values[j] - cloud.values[i])));
    });
    return 2.0 * *std::max_element(worst.begin(), worst.end());
}

/// 2 h_geom measured in moment units: the largest edge measured through mu.
/// Never larger than 2 h_geom times the Lipschitz constant, and much smaller
/// when long edges run along level sets.
inline double hull_tolerance(const SampledManifold& m, const MomentCloud& cloud, int jobs = 1) {
    return default_level_eps(m, cloud, jobs);
}

struct HullMatchReport {
    bool ok = false;
    double vertex_error = 0.0;  // max over hull vertices of distance to the nearest a_i
    double cloud_excess = 0.0;  // max over the cloud of the excess over conv{a_i}
    double tol = 0.0;
    std::vector<Vec> fixed_images;
};

inline HullMatchReport hull_matches_fixed_images(const Polytope& hull, const std::vector<FixedComponent>& comps,
                                                 const MomentCloud& cloud, double tol) {
    HullMatchReport rep;
    rep.tol = tol;
    for (const auto& c : comps) rep.fixed_images.push_back(c.value);
    if (rep.fixed_images.empty()) {
        rep.vertex_error = rep.cloud_excess = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (const auto& v : hull.vertices) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : rep.fixed_images) best = std::min(best, max_abs(Vec(v - a)));
        rep.vertex_error = std::max(rep.vertex_error, best);
    }
    const Polytope fixed_hull = convex_hull(rep.fixed_images);
    for (const auto& p : cloud.values) rep.cloud_excess = std::max(rep.cloud_excess, fixed_hull.excess(p));
    rep.ok = rep.vertex_error <= tol && rep.cloud_excess <= tol;
    return rep;
}

/// Number of connected components of the samples with |mu - a|_inf <= eps.
inline int level_connectivity(const SampledManifold& m, const MomentCloud& cloud, const Vec& a, double eps) {
    std::vector<char> band(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) band[i] = max_abs(Vec(cloud.values[i] - a)) <= eps;
    return induced_components(m, band).count;
}

inline int level_connectivity(const SampledManifold& m, const MomentData& md, const Vec& a, double eps,
                              int jobs = 1) {
    return level_connectivity(m, sample_moment_image(m, md, jobs), a, eps);
}

/// Interior grid of `per_axis` levels per coordinate, strictly inside the cloud's bounding box.
inline std::vector<Vec> interior_level_grid(const MomentCloud& cloud, int per_axis = 5) {
    std::vector<Vec> out;
    const int m = cloud.m;
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    while (true) {
        Vec a(m);
        for (int k = 0; k < m; ++k)
            a(k) = cloud.lo(k) + (cloud.hi(k) - cloud.lo(k)) * (idx[static_cast<std::size_t>(k)] + 1) / (per_axis + 1);
        out.push_back(a);
        int k = 0;
        while (k < m && ++idx[static_cast<std::size_t>(k)] == per_axis) idx[static_cast<std::size_t>(k++)] = 0;
        if (k == m) break;
    }
    return out;
}

}  // namespace gcmoment
