#include "vgeo/set_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double golden_refine(const std::function<double(double)>& g, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = g(d);
        }
    }
    return 0.5 * (a + b);
}
}  // namespace

SmoothMap SmoothMap::identity(int n) {
    SmoothMap m;
    m.domain_dim = n;
    m.codomain_dim = n;
    m.eval = [](const Vec& x) { return x; };
    m.jac = [n](const Vec&) { return Mat::Identity(n, n); };
    return m;
}

SmoothMap SmoothMap::from_exprs(const std::vector<ScalarExpr>& components, int n) {
    SmoothMap m;
    m.domain_dim = n;
    m.codomain_dim = static_cast<int>(components.size());
    m.exprs = components;
    m.eval = [components](const Vec& x) {
        Vec y(static_cast<int>(components.size()));
        for (size_t i = 0; i < components.size(); ++i) y(static_cast<int>(i)) = components[i].eval(x);
        return y;
    };
    return m;
}

SmoothMap SmoothMap::linear(const Mat& A) {
    SmoothMap m;
    m.domain_dim = static_cast<int>(A.cols());
    m.codomain_dim = static_cast<int>(A.rows());
    m.eval = [A](const Vec& x) { return Vec(A * x); };
    m.jac = [A](const Vec&) { return A; };
    return m;
}

std::vector<double> minimize_1d_multistart(const std::function<double(double)>& g, double lo,
                                           double hi, int coarse, double tol) {
    std::vector<double> vals(coarse);
    const double h = (hi - lo) / (coarse - 1);
    for (int i = 0; i < coarse; ++i) vals[i] = g(lo + i * h);
    std::vector<double> minima;
    for (int i = 0; i < coarse; ++i) {
        const bool left_ok = (i == 0) || vals[i] <= vals[i - 1];
        const bool right_ok = (i == coarse - 1) || vals[i] <= vals[i + 1];
        if (left_ok && right_ok) {
            const double a = lo + std::max(0, i - 1) * h;
            const double b = lo + std::min(coarse - 1, i + 1) * h;
            minima.push_back(golden_refine(g, a, b, tol));
        }
    }
    return minima;
}

SetOracle SetOracle::preimage(SmoothMap F, ConvexBody D, Vec center, double radius) {
    SetOracle s;
    s.kind = OracleKind::Preimage;
    s.dim = F.domain_dim;
    s.F = std::move(F);
    s.D = std::move(D);
    s.center = std::move(center);
    s.radius = radius;
    return s;
}

SetOracle SetOracle::graph(std::function<double(const Vec&)> f, Vec lo, Vec hi) {
    SetOracle s;
    s.kind = OracleKind::FunctionGraph;
    s.dim = static_cast<int>(lo.size()) + 1;
    s.f = std::move(f);
    s.dom_lo = std::move(lo);
    s.dom_hi = std::move(hi);
    return s;
}

SetOracle SetOracle::graph_expr(const ScalarExpr& e, Vec lo, Vec hi) {
    SetOracle s = graph([e](const Vec& u) { return e.eval(u); }, std::move(lo), std::move(hi));
    s.f_expr = e;
    return s;
}

SetOracle SetOracle::epigraph(std::function<double(const Vec&)> f, Vec lo, Vec hi) {
    SetOracle s = graph(std::move(f), std::move(lo), std::move(hi));
    s.kind = OracleKind::FunctionEpigraph;
    return s;
}

SetOracle SetOracle::epigraph_expr(const ScalarExpr& e, Vec lo, Vec hi) {
    SetOracle s = epigraph([e](const Vec& u) { return e.eval(u); }, std::move(lo), std::move(hi));
    s.f_expr = e;
    return s;
}

SetOracle SetOracle::curve_union(std::vector<ParametricBranch> branches, int dim) {
    SetOracle s;
    s.kind = OracleKind::CurveUnion;
    s.dim = dim;
    s.branches = std::move(branches);
    return s;
}

SetOracle SetOracle::grid_cloud(std::vector<Vec> points, double pitch) {
    SetOracle s;
    s.kind = OracleKind::GridCloud;
    s.dim = points.empty() ? 0 : static_cast<int>(points[0].size());
    s.cloud = std::move(points);
    s.pitch = pitch;
    return s;
}

double SetOracle::residual(const Vec& x) const {
    switch (kind) {
        case OracleKind::Preimage: {
            if (std::isfinite(radius) && (x - center).norm() > radius) return kInf;
            const Vec y = F(x);
            return (y - D.project(y)).norm();
        }
        case OracleKind::FunctionGraph:
        case OracleKind::FunctionEpigraph: {
            const Vec u = x.head(dim - 1);
            for (Eigen::Index i = 0; i < u.size(); ++i)
                if (u(i) < dom_lo(i) - 1e-12 || u(i) > dom_hi(i) + 1e-12) return kInf;
            const double fy = f(u);
            if (kind == OracleKind::FunctionGraph) return std::abs(x(dim - 1) - fy);
            return std::max(fy - x(dim - 1), 0.0);
        }
        case OracleKind::CurveUnion: {
            double best = kInf;
            for (const auto& br : branches) {
                auto g = [&](double t) { return (br.point(t) - x).squaredNorm(); };
                for (double t : minimize_1d_multistart(g, br.t_lo, br.t_hi))
                    best = std::min(best, (br.point(t) - x).norm());
            }
            return best;
        }
        case OracleKind::GridCloud: {
            double best = kInf;
            for (const auto& p : cloud) best = std::min(best, (p - x).norm());
            return best;
        }
    }
    throw std::logic_error("residual: bad kind");
}

bool SetOracle::membership(const Vec& x, double tol) const {
    if (x.size() != dim) throw std::invalid_argument("membership: dimension mismatch");
    const double tol_eff = kind == OracleKind::GridCloud ? std::max(tol, pitch) : tol;
    return residual(x) <= tol_eff;
}

namespace {

// Feasible-descent projector for preimage oracles: restore onto C with damped
// Gauss-Newton, then walk the active tangent space toward the query point.
struct PreimageProjector {
    const SetOracle& C;
    const ProjectionConfig& cfg;

    bool restore(Vec& y) const {
        for (int it = 0; it < 60; ++it) {
            const Vec Fy = C.F(y);
            const Vec r = Fy - C.D.project(Fy);
            const double rn = r.norm();
            if (rn <= cfg.tol) return true;
            const Mat J = C.F.jacobian(y);
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
            Vec step = cod.solve(r);
            double damp = 1.0;
            for (int ls = 0; ls < 30; ++ls) {
                Vec cand = y - damp * step;
                const Vec Fc = C.F(cand);
                if ((Fc - C.D.project(Fc)).norm() < rn) {
                    y = cand;
                    break;
                }
                damp *= 0.5;
                if (ls == 29) return false;
            }
        }
        const Vec Fy = C.F(y);
        return (Fy - C.D.project(Fy)).norm() <= 10 * cfg.tol;
    }

    bool local_solve(const Vec& x, Vec start, Vec& out) const {
        Vec y = std::move(start);
        if (!restore(y)) return false;
        double eta = 0.5;
        for (int it = 0; it < cfg.max_iter; ++it) {
            Vec d = x - y;
            if (d.norm() <= cfg.tol) break;
            // project d onto the tangent cone of the active constraints
            const Vec Fy = C.F(y);
            const Mat J = C.F.jacobian(y);
            NormalCone nc = C.D.normal_cone(Fy, 1e-7);
            std::vector<Vec> one_sided, two_sided;
            for (const auto& r : nc.rays) {
                Vec g = J.transpose() * r;
                if (g.norm() > 1e-12) one_sided.push_back(g.normalized());
            }
            for (Eigen::Index c = 0; c < nc.subspace.cols(); ++c) {
                Vec g = J.transpose() * nc.subspace.col(c);
                if (g.norm() > 1e-12) two_sided.push_back(g.normalized());
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& g : two_sided) d -= g.dot(d) * g;
                for (const auto& g : one_sided) d -= std::max(g.dot(d), 0.0) * g;
            }
            if (d.norm() <= cfg.tol) break;
            bool moved = false;
            for (int ls = 0; ls < 25 && !moved; ++ls) {
                Vec cand = y + eta * d;
                if (!restore(cand)) {
                    eta *= 0.5;
                    continue;
                }
                if ((cand - x).norm() < (y - x).norm() - 1e-15) {
                    y = cand;
                    eta = std::min(1.0, eta * 1.4);
                    moved = true;
                } else {
                    eta *= 0.5;
                }
            }
            if (!moved) break;
        }
        const Vec Fy = C.F(y);
        if ((Fy - C.D.project(Fy)).norm() > 10 * cfg.tol) return false;
        out = y;
        return true;
    }
};

std::vector<Vec> cluster_candidates(std::vector<std::pair<double, Vec>> cands,
                                    const ProjectionConfig& cfg) {
    if (cands.empty()) return {};
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double best = cands.front().first;
    const double keep = std::max(best * cfg.comin_factor, best + cfg.cluster);
    std::vector<Vec> reps;
    for (const auto& [d, p] : cands) {
        if (d > keep) break;
        bool dup = false;
        for (const auto& r : reps)
            if ((r - p).norm() <= 10 * cfg.cluster) {
                dup = true;
                break;
            }
        if (!dup) reps.push_back(p);
    }
    return reps;
}

}  // namespace

std::vector<Vec> SetOracle::project(const Vec& x, const ProjectionConfig& cfg) const {
    if (exact_project_multi) return exact_project_multi(x);

    std::vector<std::pair<double, Vec>> cands;
    switch (kind) {
        case OracleKind::Preimage: {
            PreimageProjector prj{*this, cfg};
            std::vector<Vec> starts;
            starts.push_back(x);
            if (center.size() == dim) starts.push_back(center);
            auto [lo, hi] = bounding_box();
            for (auto& s : latin_hypercube(lo, hi, cfg.multistart, cfg.seed)) starts.push_back(s);
            for (const auto& s : starts) {
                Vec y;
                if (prj.local_solve(x, s, y)) cands.emplace_back((y - x).norm(), y);
            }
            break;
        }
        case OracleKind::FunctionGraph:
        case OracleKind::FunctionEpigraph: {
            if (dim != 2)
                throw std::runtime_error("projection onto graphs supported for 1-D domains only");
            if (kind == OracleKind::FunctionEpigraph && membership(x, cfg.tol)) {
                cands.emplace_back(0.0, x);
                break;
            }
            auto g = [&](double u) {
                Vec uu(1);
                uu(0) = u;
                const double fy = f(uu);
                return (u - x(0)) * (u - x(0)) + (fy - x(1)) * (fy - x(1));
            };
            for (double u : minimize_1d_multistart(g, dom_lo(0), dom_hi(0), 1025, 1e-14)) {
                Vec uu(1);
                uu(0) = u;
                Vec p = vec2(u, f(uu));
                cands.emplace_back((p - x).norm(), p);
            }
            break;
        }
        case OracleKind::CurveUnion: {
            for (const auto& br : branches) {
                auto g = [&](double t) { return (br.point(t) - x).squaredNorm(); };
                for (double t : minimize_1d_multistart(g, br.t_lo, br.t_hi, 1025, 1e-14)) {
                    Vec p = br.point(t);
                    cands.emplace_back((p - x).norm(), p);
                }
            }
            break;
        }
        case OracleKind::GridCloud: {
            for (const auto& p : cloud) cands.emplace_back((p - x).norm(), p);
            break;
        }
    }
    auto reps = cluster_candidates(std::move(cands), cfg);
    if (reps.empty())
        throw std::runtime_error("project: no candidate found inside the bounding box");
    return reps;
}

Vec SetOracle::project_one(const Vec& x, const ProjectionConfig& cfg) const {
    return project(x, cfg).front();
}

std::pair<Vec, Vec> SetOracle::bounding_box() const {
    switch (kind) {
        case OracleKind::Preimage: {
            const double r = std::isfinite(radius) ? radius : 2.0;
            const Vec c = center.size() == dim ? center : Vec(Vec::Zero(dim));
            return {Vec(c.array() - r), Vec(c.array() + r)};
        }
        case OracleKind::FunctionGraph:
        case OracleKind::FunctionEpigraph: {
            double fmin = kInf, fmax = -kInf;
            const int samples = 512;
            for (int i = 0; i <= samples; ++i) {
                Vec u = dom_lo + (dom_hi - dom_lo) * (static_cast<double>(i) / samples);
                const double v = f(u);
                fmin = std::min(fmin, v);
                fmax = std::max(fmax, v);
            }
            const double pad = 0.25 * std::max(1e-6, fmax - fmin) + 0.05;
            Vec lo(dim), hi(dim);
            lo.head(dim - 1) = dom_lo;
            hi.head(dim - 1) = dom_hi;
            lo(dim - 1) = fmin - pad;
            hi(dim - 1) = kind == OracleKind::FunctionEpigraph
                              ? fmax + (dom_hi - dom_lo).norm()
                              : fmax + pad;
            return {lo, hi};
        }
        case OracleKind::CurveUnion: {
            Vec lo = Vec::Constant(dim, kInf), hi = Vec::Constant(dim, -kInf);
            for (const auto& br : branches)
                for (int i = 0; i <= 512; ++i) {
                    const Vec p = br.point(br.t_lo + (br.t_hi - br.t_lo) * i / 512.0);
                    lo = lo.cwiseMin(p);
                    hi = hi.cwiseMax(p);
                }
            const Vec pad = Vec::Constant(dim, 0.05);
            return {Vec(lo - pad), Vec(hi + pad)};
        }
        case OracleKind::GridCloud: {
            Vec lo = Vec::Constant(dim, kInf), hi = Vec::Constant(dim, -kInf);
            for (const auto& p : cloud) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
            const Vec pad = Vec::Constant(dim, pitch);
            return {Vec(lo - pad), Vec(hi + pad)};
        }
    }
    throw std::logic_error("bounding_box: bad kind");
}

std::vector<Vec> SetOracle::sample_near(const Vec& x, double r, int count,
                                        std::uint64_t seed) const {
    if (sampler) return sampler(x, r, count, seed);
    std::vector<Vec> out;
    switch (kind) {
        case OracleKind::FunctionGraph: {
            // abscissa sweep around x
            const int m = 4 * count;
            for (int i = 0; i < m && static_cast<int>(out.size()) < count; ++i) {
                const double u = x(0) - r + 2.0 * r * (i + 0.5) / m;
                if (u < dom_lo(0) || u > dom_hi(0)) continue;
                Vec uu(1);
                uu(0) = u;
                Vec p = vec2(u, f(uu));
                if ((p - x).norm() <= r) out.push_back(p);
            }
            return out;
        }
        case OracleKind::CurveUnion: {
            for (const auto& br : branches) {
                const int m = 4 * count;
                for (int i = 0; i <= m; ++i) {
                    const Vec p = br.point(br.t_lo + (br.t_hi - br.t_lo) * i / double(m));
                    if ((p - x).norm() <= r) out.push_back(p);
                }
            }
            return out;
        }
        case OracleKind::GridCloud: {
            for (const auto& p : cloud)
                if ((p - x).norm() <= r) out.push_back(p);
            return out;
        }
        case OracleKind::FunctionEpigraph:
        case OracleKind::Preimage: {
            ProjectionConfig cfg;
            cfg.seed = seed;
            cfg.multistart = 8;
            Vec lo = Vec(x.array() - r), hi = Vec(x.array() + r);
            for (auto& s : latin_hypercube(lo, hi, 3 * count, seed)) {
                try {
                    Vec p = project_one(s, cfg);
                    if ((p - x).norm() <= r) out.push_back(p);
                } catch (const std::runtime_error&) {
                }
                if (static_cast<int>(out.size()) >= count) break;
            }
            return out;
        }
    }
    return out;
}

}  // namespace vgeo
