#include "vgeo/regularity.hpp"

#include "vgeo/catalog.hpp"
#include "vgeo/cones.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vgeo {

namespace {

bool strictly_greater(double lhs, double rhs) {
    return lhs > rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

std::vector<std::pair<Vec, Vec>> default_pairs(const SetOracle& C, const Vec& base, double r,
                                               int samples, std::uint64_t seed) {
    std::vector<Vec> members = C.sample_near(base, r, samples, seed);
    std::vector<std::pair<Vec, Vec>> pairs;
    for (size_t i = 0; i + 1 < members.size() && static_cast<int>(pairs.size()) < samples; i += 2)
        pairs.emplace_back(members[i], members[i + 1]);
    // mirror pairs across a declared symmetry axis
    if (C.mirror_axis >= 0) {
        for (size_t i = 0; i < members.size() && pairs.size() < 2u * samples; ++i) {
            Vec m = members[i];
            m(C.mirror_axis) = -m(C.mirror_axis);
            if ((m - members[i]).norm() > 1e-12 && C.membership(m, 1e-7) &&
                (m - base).norm() <= r)
                pairs.emplace_back(members[i], m);
        }
    }
    return pairs;
}

struct ReparamCurve {
    std::function<Vec(double)> pos;
    std::function<Vec(double)> vel;
};

// speed profile constant inside corner-free runs and C^1-ramped to zero at
// every genuine corner of the polyline
ReparamCurve build_corner_stop(const Polyline& pl_in, double corner_angle) {
    auto pl = std::make_shared<Polyline>(pl_in);
    const int m = static_cast<int>(pl->size());
    if (m < 2) throw std::invalid_argument("corner_stop: degenerate polyline");

    auto seg_len = std::make_shared<std::vector<double>>();
    auto cum = std::make_shared<std::vector<double>>();   // cumulative length at node i
    cum->push_back(0.0);
    for (int i = 0; i + 1 < m; ++i) {
        const double l = ((*pl)[i + 1] - (*pl)[i]).norm();
        seg_len->push_back(l);
        cum->push_back(cum->back() + l);
    }
    const double total = cum->back();
    if (total < 1e-15) {
        Vec p0 = (*pl)[0];
        return {[p0](double) { return p0; }, [p0](double) { return Vec(Vec::Zero(p0.size())); }};
    }

    // genuine corners: turns beyond the fixed angle threshold
    auto corner_s = std::make_shared<std::vector<double>>();  // arclengths of corner nodes
    for (int i = 1; i + 1 < m; ++i) {
        if ((*seg_len)[i - 1] < 1e-15 || (*seg_len)[i] < 1e-15) continue;
        Vec a = ((*pl)[i] - (*pl)[i - 1]) / (*seg_len)[i - 1];
        Vec b = ((*pl)[i + 1] - (*pl)[i]) / (*seg_len)[i];
        const double turn = std::acos(std::min(1.0, std::max(-1.0, a.dot(b))));
        if (turn > corner_angle) corner_s->push_back((*cum)[i]);
    }

    // runs between corners, time allocated proportional to run length
    auto run_s0 = std::make_shared<std::vector<double>>();
    auto run_s1 = std::make_shared<std::vector<double>>();
    {
        double s0 = 0.0;
        for (double cs : *corner_s) {
            run_s0->push_back(s0);
            run_s1->push_back(cs);
            s0 = cs;
        }
        run_s0->push_back(s0);
        run_s1->push_back(total);
    }
    const int nruns = static_cast<int>(run_s0->size());

    // per-run normalized speed profile with ramps on corner-adjacent ends
    constexpr double kRamp = 0.3;
    auto smooth = [](double z) { return z <= 0 ? 0.0 : (z >= 1 ? 1.0 : z * z * (3 - 2 * z)); };
    auto speed = [smooth, nruns](int run, double tau) {
        double v = 1.0;
        const bool ramp_in = run > 0;          // run starts at a corner
        const bool ramp_out = run + 1 < nruns; // run ends at a corner
        if (ramp_in) v *= smooth(tau / kRamp);
        if (ramp_out) v *= smooth((1 - tau) / kRamp);
        return v;
    };

    // normalization and cumulative warp per run (fine trapezoid table)
    const int kTab = 1024;
    auto warp = std::make_shared<std::vector<std::vector<double>>>(nruns);
    auto warp_norm = std::make_shared<std::vector<double>>(nruns);
    for (int r = 0; r < nruns; ++r) {
        auto& tab = (*warp)[r];
        tab.resize(kTab + 1, 0.0);
        for (int i = 1; i <= kTab; ++i) {
            const double t0 = static_cast<double>(i - 1) / kTab, t1 = static_cast<double>(i) / kTab;
            tab[i] = tab[i - 1] + 0.5 * (speed(r, t0) + speed(r, t1)) / kTab;
        }
        (*warp_norm)[r] = tab[kTab];
    }

    auto point_at_s = [pl, cum, seg_len](double s) {
        s = std::min(std::max(s, 0.0), cum->back());
        auto it = std::upper_bound(cum->begin(), cum->end(), s);
        int i = std::max(0, static_cast<int>(it - cum->begin()) - 1);
        i = std::min(i, static_cast<int>(seg_len->size()) - 1);
        const double ds = s - (*cum)[i];
        const double l = std::max((*seg_len)[i], 1e-300);
        return Vec((*pl)[i] + ((*pl)[i + 1] - (*pl)[i]) * (ds / l));
    };
    auto dir_at_s = [pl, cum, seg_len](double s) {
        s = std::min(std::max(s, 0.0), cum->back());
        auto it = std::upper_bound(cum->begin(), cum->end(), s);
        int i = std::max(0, static_cast<int>(it - cum->begin()) - 1);
        i = std::min(i, static_cast<int>(seg_len->size()) - 1);
        const double l = std::max((*seg_len)[i], 1e-300);
        return Vec(((*pl)[i + 1] - (*pl)[i]) / l);
    };

    // run lookup: time share proportional to run length
    auto locate = [run_s0, run_s1, total](double t) {
        const double s_share = t * total;
        int r = 0;
        const int n = static_cast<int>(run_s0->size());
        while (r + 1 < n && s_share > (*run_s1)[r]) ++r;
        const double len = (*run_s1)[r] - (*run_s0)[r];
        const double tau = len > 1e-300 ? (s_share - (*run_s0)[r]) / len : 0.0;
        return std::pair<int, double>(r, std::min(std::max(tau, 0.0), 1.0));
    };

    auto pos = [locate, warp, warp_norm, run_s0, run_s1, point_at_s](double t) {
        auto [r, tau] = locate(t);
        const auto& tab = (*warp)[r];
        const double ft = tau * (tab.size() - 1);
        const int i0 = std::min(static_cast<int>(ft), static_cast<int>(tab.size()) - 2);
        const double frac = ft - i0;
        const double zi = ((1 - frac) * tab[i0] + frac * tab[i0 + 1]) / (*warp_norm)[r];
        const double s = (*run_s0)[r] + zi * ((*run_s1)[r] - (*run_s0)[r]);
        return point_at_s(s);
    };
    auto vel = [locate, warp_norm, run_s0, run_s1, dir_at_s, total, smooth, nruns,
                warp](double t) {
        auto [r, tau] = locate(t);
        const bool ramp_in = r > 0;
        const bool ramp_out = r + 1 < nruns;
        double v = 1.0;
        if (ramp_in) v *= smooth(tau / kRamp);
        if (ramp_out) v *= smooth((1 - tau) / kRamp);
        const double len = (*run_s1)[r] - (*run_s0)[r];
        const double dt_run = len / total;   // time allocated to the run
        const auto& tab = (*warp)[r];
        const double ft = tau * (tab.size() - 1);
        const int i0 = std::min(static_cast<int>(ft), static_cast<int>(tab.size()) - 2);
        const double frac = ft - i0;
        const double zi = ((1 - frac) * tab[i0] + frac * tab[i0 + 1]) / (*warp_norm)[r];
        const double s = (*run_s0)[r] + zi * len;
        const double speed_mag = dt_run > 1e-300 ? len * v / ((*warp_norm)[r] * dt_run) : 0.0;
        return Vec(dir_at_s(s) * speed_mag);
    };
    return {pos, vel};
}

}  // namespace

SampledCurve corner_stop_curve(const Polyline& pl, int nodes, double corner_angle) {
    ReparamCurve rc = build_corner_stop(pl, corner_angle);
    SampledCurve c;
    c.grid = uniform_grid(nodes);
    c.points.resize(nodes);
    c.deriv.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        c.points[i] = rc.pos(c.grid(i));
        c.deriv[i] = rc.vel(c.grid(i));
    }
    c.meta = "corner-stop-polyline";
    return c;
}

RegularityVerdict check_super_regularity(const SetOracle& C, const Vec& base, double eps,
                                         double r, const CheckOptions& opts) {
    RegularityVerdict v;
    v.property = "super-regularity";
    v.set_name = C.name;
    v.base = base;
    v.eps = eps;
    v.radius = r;
    v.seed = opts.seed;

    // structured family first: reproduces the paper-style mirror witnesses
    if (C.witness_family) {
        for (int k = 1; k <= 512; ++k) {
            Vec x, xp, nv;
            if (!C.witness_family(k, x, xp, nv)) break;
            if ((x - base).norm() > r || (xp - base).norm() > r) continue;
            ++v.samples;
            const double lhs = nv.dot(xp - x);
            const double rhs = eps * nv.norm() * (xp - x).norm();
            v.margin_min = std::min(v.margin_min, rhs - lhs);
            if (strictly_greater(lhs, rhs)) {
                v.verdict = Verdict::Violated;
                v.wx = x;
                v.wxp = xp;
                v.wv = nv;
                v.lhs = lhs;
                v.rhs = rhs;
                v.note = "structured mirror family, k=" + std::to_string(k);
                return v;
            }
        }
    }

    auto pairs = default_pairs(C, base, r, opts.samples, opts.seed);
    int normal_budget = 12;
    for (const auto& [x, xp] : pairs) {
        ++v.samples;
        std::vector<Vec> normals;
        if (C.exact_normal_rays) {
            normals = C.exact_normal_rays(x);
        } else if (normal_budget > 0) {
            --normal_budget;
            try {
                normals = regular_normal_sample(C, x, r / 2, 48, 1e-3, opts.seed).directions;
            } catch (const std::runtime_error&) {
                continue;
            }
        }
        for (const auto& nv : normals) {
            const double lhs = nv.dot(xp - x);
            const double rhs = eps * nv.norm() * (xp - x).norm();
            v.margin_min = std::min(v.margin_min, rhs - lhs);
            if (strictly_greater(lhs, rhs)) {
                v.verdict = Verdict::Violated;
                v.wx = x;
                v.wxp = xp;
                v.wv = nv;
                v.lhs = lhs;
                v.rhs = rhs;
                return v;
            }
        }
    }
    return v;
}

RegularityVerdict check_uag(const SetOracle& C, const Vec& base, double eps, double r,
                            const CheckOptions& opts,
                            const std::vector<std::pair<Vec, Vec>>* pairs_in) {
    RegularityVerdict v;
    v.property = "uag";
    v.set_name = C.name;
    v.base = base;
    v.eps = eps;
    v.radius = r;
    v.seed = opts.seed;
    v.note = "violations are heuristic: the direction fit is a search";

    std::vector<std::pair<Vec, Vec>> pairs;
    if (pairs_in) {
        pairs = *pairs_in;
    } else {
        for (const Vec& m : C.sample_near(base, r, std::min(opts.samples, 24), opts.seed))
            if ((m - base).norm() > 1e-12) pairs.emplace_back(base, m);
    }

    for (const auto& [x, xp] : pairs) {
        // a feasible straight chord settles the pair with d = x' - x
        {
            bool feas = true;
            for (int i = 0; i <= 64 && feas; ++i)
                if (C.residual(Vec(x + (xp - x) * (i / 64.0))) > 1e-7) feas = false;
            if (feas) {
                ++v.samples;
                v.margin_min = std::min(v.margin_min, eps);
                continue;
            }
        }
        Polyline pl;
        if (C.exact_curve)
            pl = C.exact_curve(x, xp);
        else
            pl = intrinsic_distance_grid(C, x, xp, std::max((x - xp).norm(), 1e-3) / 200).shortest;
        if (pl.size() < 2) continue;
        ++v.samples;

        std::vector<double> cum = {0.0};
        for (size_t i = 0; i + 1 < pl.size(); ++i)
            cum.push_back(cum.back() + (pl[i + 1] - pl[i]).norm());
        const double total = std::max(cum.back(), 1e-300);

        // candidate parametrizations: arclength share, and abscissa share for
        // graph-like chains
        std::vector<std::vector<double>> params;
        std::vector<double> tarc(pl.size());
        for (size_t i = 0; i < pl.size(); ++i) tarc[i] = cum[i] / total;
        params.push_back(tarc);
        if (std::abs(xp(0) - x(0)) > 1e-12) {
            std::vector<double> tabs(pl.size());
            bool mono = true;
            for (size_t i = 0; i < pl.size(); ++i) {
                tabs[i] = (pl[i](0) - x(0)) / (xp(0) - x(0));
                if (tabs[i] < -1e-9 || tabs[i] > 1 + 1e-9) mono = false;
                if (i > 0 && tabs[i] < tabs[i - 1] - 1e-12) mono = false;
            }
            if (mono) params.push_back(tabs);
        }

        double best_ratio = std::numeric_limits<double>::infinity();
        Vec best_d;
        for (const auto& ts : params) {
            std::vector<Vec> dirs;
            dirs.push_back(xp - x);
            double stt = 0.0;
            Vec std_ = Vec::Zero(C.dim);
            for (size_t i = 0; i < pl.size(); ++i) {
                stt += ts[i] * ts[i];
                std_ += ts[i] * (pl[i] - x);
            }
            if (stt > 1e-300) dirs.push_back(std_ / stt);
            for (const auto& d : dirs) {
                const double dn = d.norm();
                if (dn < 1e-300) continue;
                double worst = 0.0;
                for (size_t i = 0; i < pl.size(); ++i) {
                    const double lhs = (pl[i] - (x + ts[i] * d)).norm();
                    const double rhs = eps * ts[i] * dn;
                    if (lhs > rhs)
                        worst = std::max(worst, ts[i] > 1e-12 ? lhs / (ts[i] * dn)
                                                              : (lhs > 1e-12 ? 1e300 : 0.0));
                }
                if (worst < best_ratio) {
                    best_ratio = worst;
                    best_d = d;
                }
            }
        }
        v.margin_min = std::min(v.margin_min, eps - best_ratio);
        if (best_ratio > eps * (1 + 1e-9)) {
            v.verdict = Verdict::Violated;
            v.wx = x;
            v.wxp = xp;
            v.wv = best_d;
            v.lhs = best_ratio;
            v.rhs = eps;
            return v;
        }
    }
    return v;
}

RegularityVerdict check_intrinsic_approx_convexity(const SetOracle& C, const Vec& base,
                                                   double eps, double r,
                                                   const CheckOptions& opts) {
    RegularityVerdict v;
    v.property = "intrinsic-approx-convexity";
    v.set_name = C.name;
    v.base = base;
    v.eps = eps;
    v.radius = r;
    v.seed = opts.seed;

    for (const auto& [x, xp] : default_pairs(C, base, r, opts.samples, opts.seed)) {
        const double chord = (xp - x).norm();
        if (chord < 1e-12) continue;
        for (int it = 1; it < 32; ++it) {
            const double t = it / 32.0;
            const Vec line = (1 - t) * x + t * xp;
            double dist;
            try {
                dist = (line - C.project_one(line, opts.proj)).norm();
            } catch (const std::runtime_error&) {
                continue;
            }
            const double rhs = eps * t * (1 - t) * chord;
            ++v.samples;
            v.margin_min = std::min(v.margin_min, rhs - dist);
            if (strictly_greater(dist, rhs)) {
                v.verdict = Verdict::Violated;
                v.wx = x;
                v.wxp = xp;
                v.wt = t;
                v.lhs = dist;
                v.rhs = rhs;
                return v;
            }
        }
    }
    return v;
}

RegularityVerdict check_function_approx_convexity(const std::function<double(const Vec&)>& f,
                                                  const Vec& base, double eps, double r,
                                                  const CheckOptions& opts) {
    RegularityVerdict v;
    v.property = "function-approx-convexity";
    v.set_name = "f(" + std::to_string(base.size()) + "-dim)";
    v.base = base;
    v.eps = eps;
    v.radius = r;
    v.seed = opts.seed;

    const Vec lo = Vec(base.array() - r), hi = Vec(base.array() + r);
    auto pts = latin_hypercube(lo, hi, 2 * opts.samples, opts.seed);
    for (size_t i = 0; i + 1 < pts.size(); i += 2) {
        const Vec &x = pts[i], &xp = pts[i + 1];
        const double chord = (xp - x).norm();
        if (chord < 1e-12) continue;
        double fx, fxp;
        try {
            fx = f(x);
            fxp = f(xp);
        } catch (const EvalError&) {
            continue;
        }
        for (int it = 1; it < 32; ++it) {
            const double t = it / 32.0;
            double fm;
            try {
                fm = f(Vec((1 - t) * x + t * xp));
            } catch (const EvalError&) {
                continue;
            }
            const double rhs = (1 - t) * fx + t * fxp + eps * t * (1 - t) * chord;
            ++v.samples;
            v.margin_min = std::min(v.margin_min, rhs - fm);
            if (strictly_greater(fm, rhs)) {
                v.verdict = Verdict::Violated;
                v.wx = x;
                v.wxp = xp;
                v.wt = t;
                v.lhs = fm;
                v.rhs = rhs;
                return v;
            }
        }
    }
    return v;
}

RegularityVerdict check_function_approx_convexity(const ScalarExpr& f, const Vec& base,
                                                  double eps, double r,
                                                  const CheckOptions& opts) {
    return check_function_approx_convexity(
        [&f](const Vec& x) { return f.eval(x); }, base, eps, r, opts);
}

RegularityVerdict probe_prox_regularity(const SetOracle& C, const Vec& base, double r, int grid,
                                        const CheckOptions& opts) {
    RegularityVerdict v;
    v.property = "prox-regularity";
    v.set_name = C.name;
    v.base = base;
    v.radius = r;
    v.seed = opts.seed;
    if (C.dim > 3) throw std::invalid_argument("probe_prox_regularity: dim > 3 unsupported");

    std::vector<int> idx(C.dim, 0);
    while (true) {
        Vec x(C.dim);
        for (int d = 0; d < C.dim; ++d) x(d) = base(d) - r + 2.0 * r * idx[d] / grid;
        if (!C.membership(x, 1e-9)) {
            try {
                auto reps = C.project(x, opts.proj);
                ++v.samples;
                // the 1.05x co-minimal net casts wide; a genuine witness must
                // re-evaluate as equidistant at solver accuracy
                if (reps.size() >= 2) {
                    const double d0 = (reps[0] - x).norm();
                    const double d1 = (reps[1] - x).norm();
                    if (d1 - d0 > std::max(1e-7, 1e-6 * d0)) reps.resize(1);
                }
                if (reps.size() >= 2 && (reps[1] - reps[0]).norm() > 10 * opts.proj.cluster) {
                    v.verdict = Verdict::Violated;
                    v.wx = x;
                    v.wxp = reps[0];
                    v.wv = reps[1];
                    v.lhs = (reps[0] - x).norm();
                    v.rhs = (reps[1] - x).norm();
                    std::ostringstream os;
                    os << "multivalued projection, " << reps.size() << " co-minimal points";
                    v.note = os.str();
                    return v;
                }
            } catch (const std::runtime_error&) {
            }
        }
        int d = C.dim - 1;
        while (d >= 0 && idx[d] == grid) idx[d--] = 0;
        if (d < 0) break;
        ++idx[d];
    }
    return v;
}

RegularityVerdict clarke_verdict_catalog(const std::string& name, const Vec& x) {
    RegularityVerdict v;
    v.property = "clarke-regularity";
    v.set_name = name;
    v.base = x;
    v.note = "exact cone comparison";

    auto regular = [&](const std::string& why) {
        v.verdict = Verdict::NoViolationFound;
        v.note = why;
        return v;
    };
    auto irregular = [&](const std::string& why) {
        v.verdict = Verdict::Violated;
        v.note = why;
        return v;
    };

    if (name == "parabola-pair") {
        const bool up = std::abs(x(1) - x(0) * x(0)) <= 1e-9;
        const bool dn = std::abs(x(1) + x(0) * x(0)) <= 1e-9;
        if (!up && !dn) throw std::invalid_argument("clarke: point not on parabola-pair");
        return regular("normal line (-2x,1)R (or mirror); limiting cone matches");
    }
    if (name == "sawtooth-graph") {
        if (std::abs(x(1) - sawtooth(x(0))) > 1e-9)
            throw std::invalid_argument("clarke: point not on sawtooth-graph");
        const double a = x(0);
        if (a <= 0.0 || a > 0.5 + 1e-12) return regular("flat part of the graph");
        const int k = static_cast<int>(std::floor(std::log2(1.0 / a) + 1e-12));
        for (int kk = std::max(1, k - 1); kk <= k + 1; ++kk) {
            const double apex = 3.0 * std::ldexp(1.0, -(kk + 2));
            const double lo = std::ldexp(1.0, -(kk + 1));
            const double hi = std::ldexp(1.0, -kk);
            if (std::abs(a - apex) <= 1e-12)
                return irregular("tooth apex: regular cone is a wedge, limiting cone adds the "
                                 "branch normal lines");
            if (std::abs(a - lo) <= 1e-12 || std::abs(a - hi) <= 1e-12)
                return irregular("tooth valley corner");
        }
        return regular("smooth point of a tooth");
    }
    if (name == "halfplane") return regular("convex");
    if (name == "unit-ball") return regular("convex");
    if (name == "unit-circle") return regular("C^1 manifold");
    if (name == "power32-graph") {
        if (std::abs(x(1) - std::pow(std::abs(x(0)), 1.5)) > 1e-9)
            throw std::invalid_argument("clarke: point not on power32-graph");
        return regular("C^1 manifold (graph of a C^1 function)");
    }
    if (name == "quartic-cross") {
        const bool r1 = std::abs(x(0) - x(1) * x(1)) <= 1e-9;
        const bool r2 = std::abs(x(0) + x(1) * x(1)) <= 1e-9;
        if (!r1 && !r2) throw std::invalid_argument("clarke: point not on quartic-cross");
        if (x.norm() <= 1e-12)
            return regular("both branch normal lines collapse to the horizontal axis");
        return regular("smooth branch point");
    }
    if (name == "parabola-band") return regular("prox-regular at the fold, boundary smooth elsewhere");
    if (name == "parabola-epigraph") return regular("convex");
    throw std::invalid_argument("clarke_verdict_catalog: no exact cone formulas for '" + name +
                                "'");
}

RegularityVerdict search_eps_path_violation(const SetOracle& C, const Vec& base, double eps,
                                            const std::vector<std::pair<Vec, Vec>>& pairs,
                                            const CheckOptions& opts) {
    RegularityVerdict v;
    v.property = "eps-path-violation";
    v.set_name = C.name;
    v.base = base;
    v.eps = eps;
    v.seed = opts.seed;
    v.note = "heuristic falsification: no candidate beat eps (search, not proof)";

    PathOptions popts;
    for (const auto& [x, xp] : pairs) {
        ++v.samples;
        double best = std::numeric_limits<double>::infinity();
        std::string best_name = "none";

        // straight chord
        {
            SampledCurve seg = segment_curve(x, xp, 513);
            bool feas = true;
            for (const auto& p : seg.points)
                if (C.residual(p) > 1e-6) {
                    feas = false;
                    break;
                }
            if (feas) {
                const double a = verify_eps_path(seg, C, x, xp, eps, popts).achieved;
                if (a < best) {
                    best = a;
                    best_name = "chord";
                }
            }
        }
        if (best <= eps) {
            v.margin_min = std::min(v.margin_min, eps - best);
            continue;
        }

        // corner-stopped feasible polyline
        try {
            Polyline pl;
            double feas_tol = 1e-6;
            if (C.exact_curve) {
                pl = C.exact_curve(x, xp);
            } else {
                const double pitch = std::max((x - xp).norm(), 1e-3) / 200;
                pl = intrinsic_distance_grid(C, x, xp, pitch).shortest;
                feas_tol = 2 * pitch;
            }
            if (pl.size() >= 2) {
                ReparamCurve rc = build_corner_stop(pl, 1e-3);
                const double order = second_difference_order(rc.pos, 257);
                SampledCurve cur = corner_stop_curve(pl, 2049);
                PathOptions po = popts;
                po.feas_tol = feas_tol;
                EpsPathReport r = verify_eps_path(cur, C, x, xp, eps, po);
                if (order >= 1.5 && r.feasibility_residual_max <= feas_tol && r.achieved < best) {
                    best = r.achieved;
                    best_name = "polyline-c1";
                }
            }
        } catch (const std::exception&) {
        }
        if (best <= eps) {
            v.margin_min = std::min(v.margin_min, eps - best);
            continue;
        }

        // averaging map
        try {
            AveragingOptions aopts;
            aopts.levels = 10;
            aopts.proj = opts.proj;
            auto [cur, trace] = averaging_map(C, x, xp, aopts);
            const double s1 = max_second_difference(cur, 1);
            const double s2 = max_second_difference(cur, 2);
            const double order = s1 > 1e-14 ? std::log2(s2 / s1) : 2.0;
            const EpsPathReport r = verify_eps_path(cur, C, x, xp, eps, popts);
            if (order >= 1.5 && r.feasibility_residual_max <= popts.feas_tol && r.achieved < best) {
                best = r.achieved;
                best_name = "averaging-map";
            }
        } catch (const std::exception&) {
        }

        v.margin_min = std::min(v.margin_min, eps - best);
        if (best > eps * (1 + 1e-9)) {
            v.verdict = Verdict::Violated;
            v.wx = x;
            v.wxp = xp;
            v.lhs = best;
            v.rhs = eps;
            v.note = "best candidate '" + best_name + "' achieved " + std::to_string(best) +
                     " > eps (heuristic falsification)";
            return v;
        }
    }
    return v;
}

}  // namespace vgeo
