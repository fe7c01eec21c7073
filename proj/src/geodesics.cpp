#include "vgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace vgeo {

namespace {

// local projection helper: narrows the search for deep refinement levels
Vec project_local(const SetOracle& C, const Vec& m, double window, const ProjectionConfig& cfg,
                  bool full, bool* multivalued, Vec* second) {
    if (C.exact_project_multi || full) {
        auto reps = C.project(m, cfg);
        if (reps.size() >= 2 && (reps[1] - reps[0]).norm() > 10 * cfg.cluster) {
            if (multivalued) {
                *multivalued = true;
                if (second) *second = reps[1];
            }
        }
        return reps.front();
    }
    switch (C.kind) {
        case OracleKind::FunctionGraph:
        case OracleKind::FunctionEpigraph: {
            if (C.kind == OracleKind::FunctionEpigraph && C.membership(m, cfg.tol)) return m;
            const double lo = std::max(C.dom_lo(0), m(0) - window);
            const double hi = std::min(C.dom_hi(0), m(0) + window);
            auto g = [&](double u) {
                Vec uu(1);
                uu(0) = u;
                const double fy = C.f(uu);
                return (u - m(0)) * (u - m(0)) + (fy - m(1)) * (fy - m(1));
            };
            double best = std::numeric_limits<double>::infinity();
            Vec bp;
            for (double u : minimize_1d_multistart(g, lo, hi, 65, 1e-14)) {
                Vec uu(1);
                uu(0) = u;
                Vec p = vec2(u, C.f(uu));
                if ((p - m).squaredNorm() < best) {
                    best = (p - m).squaredNorm();
                    bp = p;
                }
            }
            return bp;
        }
        case OracleKind::CurveUnion: {
            double best = std::numeric_limits<double>::infinity();
            Vec bp;
            for (const auto& br : C.branches) {
                auto g = [&](double t) { return (br.point(t) - m).squaredNorm(); };
                for (double t : minimize_1d_multistart(g, br.t_lo, br.t_hi, 257, 1e-14)) {
                    Vec p = br.point(t);
                    if ((p - m).squaredNorm() < best) {
                        best = (p - m).squaredNorm();
                        bp = p;
                    }
                }
            }
            return bp;
        }
        default: {
            ProjectionConfig local = cfg;
            local.multistart = 4;
            return C.project(m, local).front();
        }
    }
}

}  // namespace

std::pair<SampledCurve, RefinementTrace> averaging_map(const SetOracle& C, const Vec& x,
                                                       const Vec& xp,
                                                       const AveragingOptions& opts) {
    if (!C.membership(x, 1e-6) || !C.membership(xp, 1e-6))
        throw std::invalid_argument("averaging_map: endpoints not in C");

    std::vector<Vec> nodes = {x, xp};
    RefinementTrace trace;
    trace.lengths.push_back((xp - x).norm());
    trace.displacements.push_back(0.0);
    trace.node_counts.push_back(2);

    for (int level = 0; level < opts.levels; ++level) {
        const int segs = static_cast<int>(nodes.size()) - 1;
        std::vector<Vec> mids(segs), proj(segs);
        std::vector<char> bad(segs, 0);
        std::vector<Vec> bad_second(segs);
        const bool full = level < opts.exact_levels;
        double spacing = 0.0;
        for (int k = 0; k < segs; ++k)
            spacing = std::max(spacing, (nodes[k + 1] - nodes[k]).norm());

        parallel_for(segs, [&](int k) {
            mids[k] = 0.5 * (nodes[k] + nodes[k + 1]);
            bool mv = false;
            Vec second;
            proj[k] = project_local(C, mids[k], std::max(4.0 * spacing, 1e-6), opts.proj, full,
                                    &mv, &second);
            if (mv) {
                bad[k] = 1;
                bad_second[k] = second;
            }
        });
        for (int k = 0; k < segs; ++k)
            if (bad[k]) {
                std::ostringstream os;
                os << "averaging_map: multivalued projection at level " << level
                   << " (prox-regularity fails at the working scale)";
                throw std::runtime_error(os.str());
            }

        std::vector<Vec> refined;
        refined.reserve(2 * nodes.size() - 1);
        double disp = 0.0;
        for (int k = 0; k < segs; ++k) {
            refined.push_back(nodes[k]);
            refined.push_back(proj[k]);
            disp = std::max(disp, (proj[k] - mids[k]).norm());
        }
        refined.push_back(nodes.back());
        nodes = std::move(refined);

        trace.lengths.push_back(polyline_length(nodes));
        trace.displacements.push_back(disp);
        trace.node_counts.push_back(static_cast<int>(nodes.size()));
        trace.levels_run = level + 1;
        // a single tiny displacement can be a dyadic coincidence (midpoints
        // landing on the set); require two consecutive quiet levels
        const size_t nd = trace.displacements.size();
        if (nd >= 3 && trace.displacements[nd - 1] < opts.stop_displacement &&
            trace.displacements[nd - 2] < opts.stop_displacement)
            break;
    }

    const size_t L = trace.lengths.size();
    trace.converged = L >= 2 && std::abs(trace.lengths[L - 1] - trace.lengths[L - 2]) <= 1e-8;

    SampledCurve c;
    const int n = static_cast<int>(nodes.size());
    c.grid = uniform_grid(n);
    c.points = std::move(nodes);
    c.deriv = fd_derivative(c.points, c.grid);
    c.meta = "averaging-map";
    return {c, trace};
}

AveragingReport verify_averaging_map(const SampledCurve& gamma, const SetOracle& C,
                                     const DistanceFn& dist, double dist_err_model, double eps,
                                     const PathOptions& opts) {
    AveragingReport rep;
    rep.dist_error_model = dist_err_model;
    const Vec& x = gamma.points.front();
    const Vec& xp = gamma.points.back();
    const double dxx = dist(x, xp);

    const int n = gamma.size();
    const int probes[] = {0, n / 4, n / 2, (3 * n) / 4, n - 1};
    double worst = 0.0;
    for (int i : probes)
        for (int j : probes) {
            if (i >= j) continue;
            const double want = std::abs(gamma.grid(j) - gamma.grid(i)) * dxx;
            const double got = dist(gamma.points[i], gamma.points[j]);
            worst = std::max(worst, std::abs(got - want));
        }
    rep.max_proportionality_error = worst;
    rep.proportional = worst <= dist_err_model;
    rep.eps_report = verify_eps_path(gamma, C, x, xp, eps, opts);
    rep.passed = rep.proportional && rep.eps_report.passed;
    return rep;
}

IntrinsicDistance intrinsic_distance_grid(const SetOracle& C, const Vec& p, const Vec& q,
                                          double pitch) {
    IntrinsicDistance out;
    out.p = p;
    out.q = q;
    out.pitch = pitch;
    out.note = "grid oracle; overestimate O(pitch) per unit length";
    if (!C.membership(p, std::max(1e-7, pitch)) || !C.membership(q, std::max(1e-7, pitch)))
        throw std::invalid_argument("intrinsic_distance_grid: endpoints not in C");

    const int n = C.dim;
    auto [blo, bhi] = C.bounding_box();
    std::vector<int> dims(n);
    long long total = 1;
    for (int d = 0; d < n; ++d) {
        dims[d] = std::max(1, static_cast<int>(std::ceil((bhi(d) - blo(d)) / pitch)));
        total *= dims[d];
        if (total > 40'000'000LL)
            throw std::runtime_error("intrinsic_distance_grid: grid too large at this pitch");
    }

    auto flat_of = [&](const std::vector<int>& idx) {
        long long f = 0;
        for (int d = 0; d < n; ++d) f = f * dims[d] + idx[d];
        return f;
    };
    auto center_of = [&](long long flat) {
        Vec c(n);
        for (int d = n - 1; d >= 0; --d) {
            c(d) = blo(d) + (flat % dims[d] + 0.5) * pitch;
            flat /= dims[d];
        }
        return c;
    };
    auto cell_of = [&](const Vec& x) {
        std::vector<int> idx(n);
        for (int d = 0; d < n; ++d) {
            int i = static_cast<int>(std::floor((x(d) - blo(d)) / pitch));
            idx[d] = std::min(std::max(i, 0), dims[d] - 1);
        }
        return idx;
    };

    const double tol = pitch * std::sqrt(static_cast<double>(n));
    std::vector<char> member(total, 0);
    if (C.kind == OracleKind::CurveUnion) {
        // rasterize the branches once instead of minimizing per cell
        const int reach = static_cast<int>(std::ceil(tol / pitch)) + 1;
        std::vector<int> idx(n);
        for (const auto& br : C.branches) {
            double t = br.t_lo;
            Vec p = br.point(t);
            while (t <= br.t_hi) {
                std::vector<int> ci = cell_of(p);
                std::function<void(int)> mark = [&](int d) {
                    if (d == n) {
                        for (int dd = 0; dd < n; ++dd)
                            if (idx[dd] < 0 || idx[dd] >= dims[dd]) return;
                        const long long f = flat_of(idx);
                        if (!member[f] && (center_of(f) - p).norm() <= tol) member[f] = 1;
                        return;
                    }
                    for (int s = -reach; s <= reach; ++s) {
                        idx[d] = ci[d] + s;
                        mark(d + 1);
                    }
                };
                mark(0);
                if (t >= br.t_hi) break;
                // advance so consecutive samples stay within pitch/4
                const double speed =
                    std::max((br.point(t + 1e-7) - p).norm() / 1e-7, 1e-9);
                t = std::min(t + pitch / (4.0 * speed), br.t_hi);
                p = br.point(t);
            }
        }
    } else {
        parallel_for(static_cast<int>(total), [&](int f) {
            member[f] = C.residual(center_of(f)) <= tol ? 1 : 0;
        });
    }

    // neighborhood offsets: full 3^n - 1 for n <= 3, axis plus coordinate
    // pairs otherwise
    std::vector<std::vector<int>> offsets;
    if (n <= 3) {
        std::vector<int> off(n, -1);
        while (true) {
            bool zero = true;
            for (int d = 0; d < n; ++d)
                if (off[d] != 0) zero = false;
            if (!zero) offsets.push_back(off);
            int d = n - 1;
            while (d >= 0 && off[d] == 1) off[d--] = -1;
            if (d < 0) break;
            ++off[d];
        }
    } else {
        for (int d = 0; d < n; ++d)
            for (int s : {-1, 1}) {
                std::vector<int> off(n, 0);
                off[d] = s;
                offsets.push_back(off);
            }
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int sa : {-1, 1})
                    for (int sb : {-1, 1}) {
                        std::vector<int> off(n, 0);
                        off[a] = sa;
                        off[b] = sb;
                        offsets.push_back(off);
                    }
    }

    auto nearest_member_cell = [&](const Vec& x) -> long long {
        std::vector<int> idx = cell_of(x);
        const long long f0 = flat_of(idx);
        if (member[f0]) return f0;
        // search a small neighborhood
        long long best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        std::vector<int> probe(n);
        std::function<void(int)> rec = [&](int d) {
            if (d == n) {
                for (int dd = 0; dd < n; ++dd)
                    if (probe[dd] < 0 || probe[dd] >= dims[dd]) return;
                const long long f = flat_of(probe);
                if (member[f]) {
                    const double dd = (center_of(f) - x).norm();
                    if (dd < bestd) {
                        bestd = dd;
                        best = f;
                    }
                }
                return;
            }
            for (int s = -2; s <= 2; ++s) {
                probe[d] = idx[d] + s;
                rec(d + 1);
            }
        };
        rec(0);
        return best;
    };

    const long long src = nearest_member_cell(p), dst = nearest_member_cell(q);
    if (src < 0 || dst < 0)
        throw std::runtime_error("intrinsic_distance_grid: endpoints not covered by member cells");

    // Dijkstra over member cells
    std::vector<double> distv(total, std::numeric_limits<double>::infinity());
    std::vector<long long> prev(total, -1);
    using QEl = std::pair<double, long long>;
    std::priority_queue<QEl, std::vector<QEl>, std::greater<>> pq;
    distv[src] = 0.0;
    pq.push({0.0, src});
    std::vector<int> idx(n), nb(n);
    while (!pq.empty()) {
        auto [dcur, f] = pq.top();
        pq.pop();
        if (dcur > distv[f] + 1e-15) continue;
        if (f == dst) break;
        long long tmp = f;
        for (int d = n - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(tmp % dims[d]);
            tmp /= dims[d];
        }
        for (const auto& off : offsets) {
            bool ok = true;
            double w2 = 0.0;
            for (int d = 0; d < n; ++d) {
                nb[d] = idx[d] + off[d];
                if (nb[d] < 0 || nb[d] >= dims[d]) {
                    ok = false;
                    break;
                }
                w2 += static_cast<double>(off[d]) * off[d];
            }
            if (!ok) continue;
            const long long fn = flat_of(nb);
            if (!member[fn]) continue;
            const double nd = dcur + pitch * std::sqrt(w2);
            if (nd < distv[fn] - 1e-15) {
                distv[fn] = nd;
                prev[fn] = f;
                pq.push({nd, fn});
            }
        }
    }

    if (!std::isfinite(distv[dst])) {
        out.estimate = std::numeric_limits<double>::infinity();
        out.reachable = false;
        return out;
    }

    Polyline path;
    for (long long f = dst; f >= 0; f = prev[f]) {
        path.push_back(center_of(f));
        if (f == src) break;
    }
    std::reverse(path.begin(), path.end());
    path.front() = p;
    path.back() = q;

    // string-pull shortcutting inside the member tube to remove the
    // 8-connected metric inflation
    auto segment_in_tube = [&](const Vec& a, const Vec& b) {
        const double len = (b - a).norm();
        const int steps = std::max(2, static_cast<int>(std::ceil(len / (0.5 * pitch))));
        for (int s = 1; s < steps; ++s) {
            const Vec m = a + (b - a) * (static_cast<double>(s) / steps);
            std::vector<int> ci = cell_of(m);
            if (!member[flat_of(ci)]) return false;
        }
        return true;
    };
    Polyline pulled;
    size_t i = 0;
    pulled.push_back(path.front());
    while (i + 1 < path.size()) {
        size_t j = path.size() - 1;
        while (j > i + 1 && !segment_in_tube(path[i], path[j])) --j;
        pulled.push_back(path[j]);
        i = j;
    }

    out.shortest = std::move(pulled);
    out.estimate = std::max(polyline_length(out.shortest), (p - q).norm());
    out.reachable = true;
    return out;
}

DistanceFn make_grid_distance(const SetOracle& C, double pitch) {
    return [&C, pitch](const Vec& a, const Vec& b) {
        return intrinsic_distance_grid(C, a, b, pitch).estimate;
    };
}

SigmaFit fit_sigma(const SetOracle& C, const Vec& base, double r, int pairs,
                   const AveragingOptions& opts) {
    SigmaFit fit;
    fit.r = r;
    std::vector<Vec> members = C.sample_near(base, r, 2 * pairs + 8, 42);
    if (static_cast<int>(members.size()) < 4)
        throw std::runtime_error("fit_sigma: too few members sampled");

    const double dmin = 10.0 * 1e-6;   // oracle noise floor
    double sxx = 0.0, sxy = 0.0;
    int checked = 0;
    for (size_t i = 0; i + 1 < members.size() && fit.pairs_used < pairs; i += 2) {
        const Vec& p = members[i];
        const Vec& q = members[i + 1];
        const double d = (p - q).norm();
        if (d < dmin) continue;
        double dc;
        try {
            dc = curve_length(averaging_map(C, p, q, opts).first);
        } catch (const std::runtime_error&) {
            continue;   // multivalued projection on this pair; skip
        }
        fit.samples.emplace_back(d, dc - d);
        sxx += std::pow(d, 6);
        sxy += (dc - d) * std::pow(d, 3);
        ++fit.pairs_used;
        // cross-check a tenth of the pairs against the grid oracle
        if (fit.pairs_used % 10 == 1 && checked < 3) {
            try {
                const double dg = intrinsic_distance_grid(C, p, q, r / 100).estimate;
                fit.cross_check_error = std::max(fit.cross_check_error, std::abs(dg - dc));
                ++checked;
            } catch (const std::exception&) {
            }
        }
    }
    if (fit.pairs_used == 0) throw std::runtime_error("fit_sigma: no usable pairs");
    fit.sigma = sxx > 0 ? std::max(0.0, sxy / sxx) : 0.0;
    for (const auto& [d, defect] : fit.samples)
        fit.max_violation =
            std::max(fit.max_violation, defect - fit.sigma * (1 + fit.margin) * d * d * d);
    return fit;
}

}  // namespace vgeo
