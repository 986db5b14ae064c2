// Verification passes over a catalog example. Each pass appends named checks
// to a report and writes its CSV artifacts; results are ordered by sample id
// so they do not depend on the number of worker threads.
#pragma once

#include "gcmoment/catalog.hpp"
#include "gcmoment/convexity.hpp"
#include "gcmoment/morse.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gcmoment {

using Json = nlohmann::ordered_json;

struct RunConfig {
    std::string example = "sphere_rotation";
    int resolution = 64;
    double step = kDefaultStep;
    double tol_structure = 1e-10;
    double tol_residual = 1e-6;
    double tol_fixed = 1e-6;
    double tol_identity = 1e-5;
    double tol_deficiency = 0.02;
    double tol_hull = 0.0;  // 0 selects 2 h_geom times the Lipschitz constant of mu
    int grid = 100;
    int level_grid = 5;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out = "gcm_out";
};

inline void validate(const RunConfig& c) {
    if (c.resolution < 16) throw Error("resolution must be at least 16");
    for (double t : {c.step, c.tol_structure, c.tol_residual, c.tol_fixed, c.tol_identity, c.tol_deficiency})
        if (!(t > 0.0)) throw Error("step and tolerances must be positive");
    if (c.tol_hull < 0.0) throw Error("hull tolerance must be non-negative");
    if (c.grid < 1 || c.level_grid < 1) throw Error("grid sizes must be positive");
    if (c.jobs < 1) throw Error("jobs must be positive");
}

/// Rounds to 12 significant digits so serialized reports diff cleanly.
inline double sig12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(sig12(v(i)));
    return a;
}

inline Json num_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return sig12(v);
}

enum class Status { pass, fail, skipped, info };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::skipped: return "skipped";
        case Status::info: return "info";
    }
    return "?";
}

struct Check {
    std::string name;
    Status status = Status::info;
    double value = 0.0;
    double tolerance = 0.0;
    long long worst_sample = -1;
    Json detail = Json::object();

    [[nodiscard]] Json to_json() const {
        Json j;
        j["name"] = name;
        j["status"] = status_name(status);
        j["value"] = num_json(value);
        j["tolerance"] = num_json(tolerance);
        if (worst_sample >= 0) j["worst_sample"] = worst_sample;
        if (!detail.empty()) j["detail"] = detail;
        return j;
    }
};

inline Check below(std::string name, double value, double tol, long long worst = -1) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.tolerance = tol;
    c.worst_sample = worst;
    c.status = value < tol ? Status::pass : Status::fail;
    return c;
}

inline Check skipped(std::string name, std::string reason) {
    Check c;
    c.name = std::move(name);
    c.status = Status::skipped;
    c.detail["reason"] = std::move(reason);
    return c;
}

inline Check flag(std::string name, bool ok, Json detail = Json::object()) {
    Check c;
    c.name = std::move(name);
    c.status = ok ? Status::pass : Status::fail;
    c.value = ok ? 1.0 : 0.0;
    c.tolerance = 1.0;
    c.detail = std::move(detail);
    return c;
}

struct SweepResult {
    double worst = 0.0;
    long long worst_sample = -1;
    std::size_t errors = 0;
    long long first_error_sample = -1;
    std::string first_error;
};

/// Evaluates f at the given samples; the maximum and the lowest id attaining it are reported.
template <typename F>
SweepResult sweep(const std::vector<std::size_t>& ids, int jobs, F&& f) {
    std::vector<double> val(ids.size(), 0.0);
    std::vector<std::string> err(ids.size());
    parallel_for(ids.size(), jobs, [&](std::size_t k) {
        try {
            val[k] = f(ids[k]);
        } catch (const std::exception& e) {
            err[k] = e.what();
            val[k] = std::numeric_limits<double>::quiet_NaN();
        }
    });
    SweepResult r;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!err[k].empty()) {
            if (r.errors++ == 0) {
                r.first_error = err[k];
                r.first_error_sample = static_cast<long long>(ids[k]);
            }
            continue;
        }
        if (r.worst_sample < 0 || val[k] > r.worst) {
            r.worst = val[k];
            r.worst_sample = static_cast<long long>(ids[k]);
        }
    }
    return r;
}

inline std::vector<std::size_t> all_samples(const SampledManifold& m) {
    std::vector<std::size_t> ids(m.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return ids;
}

/// Deterministic random subset of sample ids, sorted.
inline std::vector<std::size_t> random_samples(const SampledManifold& m, std::size_t count, std::uint64_t seed) {
    if (count >= m.size()) return all_samples(m);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    std::vector<std::size_t> ids;
    ids.reserve(count);
    for (std::size_t k = 0; k < count; ++k) ids.push_back(pick(rng));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline Check sweep_check(std::string name, const SweepResult& r, double tol) {
    Check c = below(std::move(name), r.worst, tol, r.worst_sample);
    if (r.errors > 0) {
        c.status = Status::fail;
        c.detail["errors"] = r.errors;
        c.detail["first_error_sample"] = r.first_error_sample;
        c.detail["first_error"] = r.first_error;
    }
    return c;
}

inline std::string direction_label(const Vec& xi) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (Eigen::Index i = 0; i < xi.size(); ++i) os << (i ? "," : "") << xi(i);
    os << ')';
    return os.str();
}

struct Report {
    std::vector<Check> checks;
    Json artifacts = Json::object();

    void add(Check c) { checks.push_back(std::move(c)); }
    [[nodiscard]] bool passed() const {
        return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == Status::fail; });
    }
};

inline std::ofstream open_artifact(const RunConfig& cfg, Report& rep, const std::string& file) {
    std::filesystem::create_directories(cfg.out);
    const auto path = std::filesystem::path(cfg.out) / file;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(12);
    rep.artifacts[file.substr(0, file.find('.'))] = file;
    return os;
}

inline void check_structure(const Example& ex, const RunConfig& cfg, Report& rep) {
    const auto& m = *ex.manifold;
    const auto ids = all_samples(m);
    const auto axioms = sweep(ids, cfg.jobs, [&](std::size_t i) {
        const FiberStructure j = ex.fields.structure(m.point(i));
        const StructureCheck s = is_generalized_structure(j, cfg.tol_structure);
        const double scale = std::max(1.0, max_abs(j.matrix()) * max_abs(j.matrix()));
        return std::max(s.square_residual, s.pairing_residual) / scale;
    });
    rep.add(sweep_check("structure_axioms", axioms, cfg.tol_structure));

    const auto integ = sweep(ids, cfg.jobs, [&](std::size_t i) {
        return integrability_residual(ex.fields.structure, ex.fields.twist, m.point(i), cfg.step, &m).residual;
    });
    Check c = sweep_check("integrability", integ, cfg.tol_residual);
    c.detail["expected_integrable"] = ex.expected.integrable;
    rep.add(std::move(c));

    std::vector<int> types(m.size());
    parallel_for(m.size(), cfg.jobs, [&](std::size_t i) { types[i] = type_of(ex.fields.structure(m.point(i))); });
    std::map<int, std::size_t> hist;
    for (int t : types) ++hist[t];
    Check info;
    info.name = "type";
    info.status = Status::info;
    info.value = hist.rbegin()->first;
    for (const auto& [t, n] : hist) info.detail["type_" + std::to_string(t)] = n;
    rep.add(std::move(info));
}

inline void check_hamiltonian(const Example& ex, const RunConfig& cfg, Report& rep) {
    const auto& m = *ex.manifold;
    const int r = ex.action.rank;
    if (r == 0) {
        rep.add(skipped("moment_condition", "example has no torus action"));
        return;
    }
    const auto ids = all_samples(m);
    const auto mom = sweep(ids, cfg.jobs, [&](std::size_t i) {
        const ChartPoint p = m.point(i);
        double w = 0.0;
        for (int k = 0; k < r; ++k)
            w = std::max(w, moment_condition_residual(ex.fields, ex.action, ex.moment, p, unit(r, k), cfg.step, &m));
        return w;
    });
    rep.add(sweep_check("moment_condition", mom, cfg.tol_residual));
    const auto tw = sweep(ids, cfg.jobs, [&](std::size_t i) {
        const ChartPoint p = m.point(i);
        double w = 0.0;
        for (int k = 0; k < r; ++k)
            w = std::max(w, twist_condition_residual(ex.action, ex.moment, p, unit(r, k), cfg.step, &m));
        return w;
    });
    rep.add(sweep_check("twist_condition", tw, cfg.tol_residual));

    const auto probe = random_samples(m, 200, cfg.seed);
    const auto equi = sweep(probe, cfg.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        return equivariance_residual(ex.action, ex.moment, m.point(i), rng, 5);
    });
    rep.add(sweep_check("equivariance", equi, cfg.tol_residual));
    const auto inv = sweep(probe, cfg.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(cfg.seed ^ (0xbf58476d1ce4e5b9ULL * (i + 1)));
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        Vec th(r);
        for (int k = 0; k < r; ++k) th(k) = angle(rng);
        return structure_invariance_residual(ex.action, ex.fields, m.point(i), th, cfg.step);
    });
    rep.add(sweep_check("structure_invariance", inv, cfg.tol_residual));
    const auto comm = sweep(probe, cfg.jobs,
                            [&](std::size_t i) { return generator_commutator(ex.action, m.point(i), cfg.step); });
    rep.add(sweep_check("generators_commute", comm, cfg.tol_residual));
    const int rank = effectiveness_rank(m, ex.moment, r, cfg.step);
    Json d;
    d["rank"] = rank;
    d["torus_rank"] = r;
    rep.add(flag("effectiveness", rank == r, d));
}

inline void check_morse(const Example& ex, const RunConfig& cfg, Report& rep) {
    const auto& m = *ex.manifold;
    const int r = ex.action.rank;
    if (r == 0) {
        rep.add(skipped("morse", "example has no torus action"));
        return;
    }
    std::ofstream csv = open_artifact(cfg, rep, "critical.csv");
    csv << "direction,sample,component,index,coindex,nullity,component_dimension,eigenvalues\n";
    double worst_asym = 0.0, worst_spread = 0.0, worst_lxi = 0.0;
    long long lxi_sample = -1;
    bool parity = true, nullity = true;
    Json per_dir = Json::array();
    for (std::size_t dn = 0; dn < ex.directions.size(); ++dn) {
        const Vec& xi = ex.directions[dn];
        const CriticalReport cr = analyze_critical_set(m, ex.action, ex.moment, xi, cfg.tol_fixed, kHessianStep, cfg.jobs);
        parity = parity && cr.parity_ok;
        nullity = nullity && cr.nullity_matches_dimension;
        worst_asym = std::max(worst_asym, cr.max_raw_asymmetry);
        worst_spread = std::max(worst_spread, cr.max_component_spread);
        Json d;
        d["direction"] = vec_json(xi);
        d["critical_samples"] = cr.entries.size();
        Json comps = Json::array();
        const auto idx = cr.component_indices();
        for (std::size_t c = 0; c < cr.components.size(); ++c) {
            Json cj;
            cj["size"] = cr.components[c].members.size();
            cj["dimension"] = cr.components[c].dimension;
            cj["value"] = num_json(cr.components[c].value(0));
            cj["index"] = idx[c].first;
            cj["coindex"] = idx[c].second;
            comps.push_back(cj);
        }
        d["components"] = comps;
        for (const auto& e : cr.entries) {
            csv << direction_label(xi) << ',' << e.sample << ',' << e.component << ',' << e.spectrum.index << ','
                << e.spectrum.coindex << ',' << e.spectrum.nullity << ','
                << cr.components[static_cast<std::size_t>(e.component)].dimension << ',';
            for (Eigen::Index k = 0; k < e.spectrum.eigenvalues.size(); ++k)
                csv << (k ? " " : "") << sig12(e.spectrum.eigenvalues(k));
            csv << '\n';
        }
        if (dn == 0 && !ex.expected.generic_indices.empty()) {
            auto got = idx;
            std::sort(got.begin(), got.end());
            auto want = ex.expected.generic_indices;
            std::sort(want.begin(), want.end());
            Json gd;
            gd["direction"] = vec_json(xi);
            Json gj = Json::array();
            for (const auto& [a, b] : got) gj.push_back({a, b});
            gd["found"] = gj;
            rep.add(flag("generic_indices", got == want, gd));
        }
        std::vector<std::size_t> crit_ids;
        for (const auto& e : cr.entries) crit_ids.push_back(e.sample);
        const auto lxi = sweep(crit_ids, cfg.jobs, [&](std::size_t i) {
            const ChartPoint p = m.point(i);
            const FiberStructure j = ex.fields.structure(p);
            return lxi_identity_residual(j, compatible_structure(j, ex.fields.metric(p)), ex.action, ex.moment, p, xi,
                                         kHessianStep, &m);
        });
        if (lxi.errors > 0) worst_lxi = std::numeric_limits<double>::infinity();
        if (lxi.worst_sample >= 0 && lxi.worst >= worst_lxi) {
            worst_lxi = lxi.worst;
            lxi_sample = lxi.worst_sample;
        }
        const CritFixReport cf = crit_equals_fixed_check(m, ex.action, ex.moment, xi, cfg.tol_fixed, cfg.step, cfg.jobs);
        Json cfd;
        cfd["direction"] = vec_json(xi);
        cfd["critical"] = cf.critical.size();
        cfd["fixed"] = cf.fixed.size();
        if (!cf.ok()) cfd["first_discrepancy"] = cf.discrepancies.front();
        rep.add(flag("crit_equals_fixed " + direction_label(xi), cf.ok(), cfd));
        per_dir.push_back(d);
    }
    Json pd;
    pd["directions"] = per_dir;
    rep.add(flag("morse_parity", parity, pd));
    rep.add(flag("nullity_matches_fixed_dimension", nullity));
    rep.add(below("hessian_raw_asymmetry", worst_asym, 1e-6));
    rep.add(below("moment_constant_on_fixed_components", worst_spread, 1e-8));
    rep.add(below("lxi_identity", worst_lxi, cfg.tol_identity, lxi_sample));

    const auto ids = all_samples(m);
    const auto induced = sweep(ids, cfg.jobs, [&](std::size_t i) {
        const ChartPoint p = m.point(i);
        const FiberStructure j = ex.fields.structure(p);
        const GualtieriData q = gualtieri_decompose(j, compatible_structure(j, ex.fields.metric(p)));
        double w = 0.0;
        for (const Vec& xi : ex.directions)
            w = std::max(w, induced_field_identity_residual(q, ex.action, ex.moment, p, xi, cfg.step, &m));
        return w;
    });
    rep.add(sweep_check("induced_field_identity", induced, cfg.tol_identity));

    if (r >= 2) {
        const MomentCloud cloud = sample_moment_image(m, ex.moment, cfg.jobs);
        const Vec lo = cloud.lo.head(r - 1), hi = cloud.hi.head(r - 1);
        for (double t : {0.5, 0.75}) {
            const Vec a = lo + t * (hi - lo);
            const std::string name = "slice_morse " + direction_label(a);
            try {
                const SliceReport sr = slice_morse_check(m, ex.moment, r, a, cfg.tol_fixed, 1e-3, cfg.step,
                                                         kHessianStep, cfg.jobs);
                Json sd;
                sd["eps"] = num_json(sr.eps);
                sd["slice_samples"] = sr.slice_samples;
                sd["critical_components"] = sr.component_count;
                Json ij = Json::array();
                for (const auto& [x, y] : sr.component_indices()) ij.push_back({x, y});
                sd["indices"] = ij;
                rep.add(flag(name, sr.parity_ok && sr.component_count > 0, sd));
            } catch (const NonRegularValueError& e) {
                Json sd;
                sd["error"] = e.what();
                rep.add(flag(name, false, sd));
            }
        }
        bool rejected = false;
        try {
            slice_morse_check(m, ex.moment, r, hi, cfg.tol_fixed, 1e-3, cfg.step, kHessianStep, cfg.jobs);
        } catch (const NonRegularValueError&) {
            rejected = true;
        }
        rep.add(flag("slice_boundary_level_rejected", rejected));
    }
}

inline void check_convexity(const Example& ex, const RunConfig& cfg, Report& rep) {
    const auto& m = *ex.manifold;
    if (ex.action.rank == 0) {
        rep.add(skipped("convexity", "example has no torus action"));
        return;
    }
    const MomentCloud cloud = sample_moment_image(m, ex.moment, cfg.jobs);
    {
        std::ofstream csv = open_artifact(cfg, rep, "moment_cloud.csv");
        csv << "sample,chart";
        for (int k = 0; k < cloud.m; ++k) csv << ",mu" << k;
        csv << '\n';
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            csv << i << ',' << m.point(i).chart;
            for (int k = 0; k < cloud.m; ++k) csv << ',' << sig12(cloud.values[i](k));
            csv << '\n';
        }
    }
    const Polytope hull = convex_hull(cloud);
    {
        std::ofstream csv = open_artifact(cfg, rep, "hull.csv");
        csv << "vertex";
        for (int k = 0; k < cloud.m; ++k) csv << ",mu" << k;
        csv << '\n';
        for (std::size_t v = 0; v < hull.vertices.size(); ++v) {
            csv << v;
            for (int k = 0; k < cloud.m; ++k) csv << ',' << sig12(hull.vertices[v](k));
            csv << '\n';
        }
    }
    if (cloud.m <= 2) {
        const double def = convexity_deficiency(cloud, cfg.grid);
        Check c = below("convexity_deficiency", def, cfg.tol_deficiency);
        c.detail["grid"] = cfg.grid;
        rep.add(std::move(c));
    } else {
        rep.add(skipped("convexity_deficiency", "rasterization supports m <= 2"));
    }
    const FixedPointSet fixed = fixed_point_components(m, ex.action, ex.moment, cfg.tol_fixed, cfg.jobs);
    const double tol = cfg.tol_hull > 0.0 ? cfg.tol_hull : hull_tolerance(m, cloud, cfg.jobs);
    const HullMatchReport hm = hull_matches_fixed_images(hull, fixed.components, cloud, tol);
    Check c = flag("hull_matches_fixed_images", hm.ok);
    c.value = std::max(hm.vertex_error, hm.cloud_excess);
    c.tolerance = tol;
    c.detail["vertex_error"] = num_json(hm.vertex_error);
    c.detail["cloud_excess"] = num_json(hm.cloud_excess);
    Json hv = Json::array();
    for (const auto& v : hull.vertices) hv.push_back(vec_json(v));
    c.detail["hull_vertices"] = hv;
    Json fi = Json::array();
    for (const auto& a : hm.fixed_images) fi.push_back(vec_json(a));
    c.detail["fixed_images"] = fi;
    rep.add(std::move(c));
    if (!ex.expected.fixed_images.empty()) {
        double err = 0.0;
        for (const auto& want : ex.expected.fixed_images) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : hull.vertices)
                if (v.size() == want.size()) best = std::min(best, max_abs(Vec(v - want)));
            err = std::max(err, best);
        }
        if (hull.vertices.size() != ex.expected.fixed_images.size()) err = std::numeric_limits<double>::infinity();
        rep.add(below("hull_vertices_expected", err, tol));
    }
}

inline void check_levels(const Example& ex, const RunConfig& cfg, Report& rep) {
    const auto& m = *ex.manifold;
    if (ex.action.rank == 0) {
        rep.add(skipped("level_connectivity", "example has no torus action"));
        return;
    }
    const MomentCloud cloud = sample_moment_image(m, ex.moment, cfg.jobs);
    const double eps = default_level_eps(m, cloud, cfg.jobs);
    const auto levels = interior_level_grid(cloud, cfg.level_grid);
    std::ofstream csv = open_artifact(cfg, rep, "levels.csv");
    for (int k = 0; k < cloud.m; ++k) csv << 'a' << k << ',';
    csv << "eps,components\n";
    int worst = 1;
    Vec worst_level;
    for (const auto& a : levels) {
        const int n = level_connectivity(m, cloud, a, eps);
        for (int k = 0; k < cloud.m; ++k) csv << sig12(a(k)) << ',';
        csv << sig12(eps) << ',' << n << '\n';
        if (n != 1 && (worst == 1 || n > worst)) {
            worst = n;
            worst_level = a;
        }
    }
    Json d;
    d["levels"] = levels.size();
    d["eps"] = num_json(eps);
    if (worst != 1) d["worst_level"] = vec_json(worst_level);
    Check c = flag("level_connectivity", worst == 1, d);
    c.value = worst;
    rep.add(std::move(c));
}

}  // namespace gcmoment
