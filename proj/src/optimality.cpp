#include "vgeo/optimality.hpp"

#include "vgeo/cones.hpp"
#include "vgeo/geodesics.hpp"

#include <cmath>
#include <stdexcept>

namespace vgeo {

namespace {

// chord directions of projected probes at shrinking radii; a direction is
// kept when two consecutive scales agree
std::vector<Vec> feasible_sequence_dirs(const SetOracle& C, const Vec& x,
                                        const FirstOrderOptions& opts) {
    std::vector<Vec> out;
    for (const auto& u : unit_directions(C.dim, opts.dirs, opts.seed)) {
        Vec prev;
        bool have_prev = false;
        for (int j = 3; j <= 8; ++j) {
            const double s = opts.probe_radius / std::pow(2.0, j);
            Vec y;
            try {
                y = C.project_one(Vec(x + s * u), opts.proj);
            } catch (const std::runtime_error&) {
                break;
            }
            const double d = (y - x).norm();
            if (d < 1e-13) break;
            Vec c = (y - x) / d;
            if (have_prev && (c - prev).norm() < 0.05) {
                out.push_back(c);
                break;
            }
            prev = c;
            have_prev = true;
        }
    }
    return out;
}

}  // namespace

FirstOrderResult check_first_order(const ScalarExpr& f, const SetOracle& C, const Vec& x,
                                   const FirstOrderOptions& opts, const AmenableRep* rep) {
    if (!C.membership(x, 1e-7))
        throw std::invalid_argument("check_first_order: x not in C");
    FirstOrderResult res;
    res.gradient = f.gradient(x);
    if (!res.gradient.allFinite())
        throw std::runtime_error("check_first_order: gradient evaluation failed");

    std::vector<Vec> tangents;
    std::function<bool(const Vec&)> in_cone;
    if (rep) {
        AmenableRep at_x = *rep;
        at_x.base = x;
        at_x.base_jacobian = rep->F().jacobian(x);
        tangents = tangent_cone_amenable(at_x, x, opts.dirs, 1e-9, opts.seed).directions;
        const Vec Fx = rep->F()(x);
        const Mat J = at_x.base_jacobian;
        const ConvexBody D = rep->D();
        in_cone = [Fx, J, D](const Vec& u) { return D.tangent_contains(Fx, Vec(J * u), 1e-9); };
        res.note = "amenable tangent formula";
    } else {
        tangents = feasible_sequence_dirs(C, x, opts);
        res.note = "feasible-sequence chord directions";
    }
    res.directions_tested = static_cast<int>(tangents.size());

    double worst = 0.0;
    for (const auto& v : tangents) {
        const double s = res.gradient.dot(v);
        if (s < worst) {
            worst = s;
            res.worst_direction = v;
        }
    }

    // sharpen the sampled minimizer inside the cone (the spec couples the
    // descent recipe to the exact direction)
    if (in_cone && worst < 0) {
        AmenableRep at_x = *rep;
        at_x.base = x;
        at_x.base_jacobian = rep->F().jacobian(x);
        const AffineHull hull = rep->D().affine_hull();
        Mat Aeq(0, rep->F().domain_dim);
        if (hull.dim() < rep->D().dim()) {
            const int m = rep->D().dim();
            Mat P = Mat::Identity(m, m) - hull.basis * hull.basis.transpose();
            Eigen::ColPivHouseholderQR<Mat> qr(P);
            Mat Qperp = qr.householderQ() * Mat::Identity(m, m - hull.dim());
            Aeq = Qperp.transpose() * at_x.base_jacobian;
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(Aeq);
        auto snap = [&](Vec u) {
            if (Aeq.rows() > 0) u -= cod.solve(Vec(Aeq * u));
            const double n = u.norm();
            return n > 1e-12 ? Vec(u / n) : u;
        };
        Vec best = res.worst_direction;
        for (double rad : {0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4}) {
            for (const auto& p : unit_directions(C.dim, 24, 777)) {
                Vec u = snap(Vec(best + rad * p));
                if (u.norm() < 0.5 || !in_cone(u)) continue;
                const double s = res.gradient.dot(u);
                if (s < worst - 1e-15) {
                    worst = s;
                    best = u;
                }
            }
        }
        res.worst_direction = best;
    }
    res.worst_slope = worst;
    res.holds = worst >= -opts.tol;
    return res;
}

DescentReport descent_path(const ScalarExpr& f, const SetOracle& C, const Vec& x,
                           const FirstOrderOptions& opts, const AmenableRep* rep,
                           double step_hint) {
    FirstOrderResult fo = check_first_order(f, C, x, opts, rep);
    if (fo.holds)
        throw std::runtime_error(
            "descent_path: first-order condition holds at tolerance; no descent direction");

    DescentReport rep_out;
    rep_out.x = x;
    rep_out.gradient = fo.gradient;
    rep_out.direction = fo.worst_direction;
    rep_out.predicted_slope = fo.worst_slope;
    const double gn = fo.gradient.norm();
    rep_out.eps_used = std::max(-fo.worst_slope / (2.0 * std::max(gn, 1e-300)), 1e-3);

    const double s0 = step_hint > 0 ? step_hint : opts.probe_radius / 16.0;
    std::string fail_note;
    for (int k = 0; k < 12; ++k) {
        const double s = s0 / std::pow(2.0, k);
        Vec target;
        try {
            target = C.project_one(Vec(x + s * fo.worst_direction), opts.proj);
        } catch (const std::runtime_error&) {
            continue;
        }
        if ((target - x).norm() < 1e-13) continue;

        SampledCurve curve;
        bool built = false;
        if (rep) {
            try {
                curve = build_eps_path(*rep, x, target, rep_out.eps_used).first;
                built = true;
            } catch (const std::exception& e) {
                fail_note = e.what();
            }
        }
        if (!built) {
            try {
                AveragingOptions aopts;
                aopts.proj = opts.proj;
                curve = averaging_map(C, x, target, aopts).first;
                built = true;
            } catch (const std::exception& e) {
                fail_note = e.what();
                continue;
            }
        }

        // objective along the curve; initial slope per unit speed
        std::vector<double> fv(curve.size());
        for (int i = 0; i < curve.size(); ++i) fv[i] = f.eval(curve.points[i]);
        const double v0 = curve.deriv.front().norm();
        const double slope =
            v0 > 1e-300 ? fo.gradient.dot(curve.deriv.front()) / v0 : 0.0;
        if (slope >= 0) {
            fail_note = "initial slope nonnegative at scale " + std::to_string(s);
            continue;
        }

        int istar = 0;
        while (istar + 1 < curve.size() && fv[istar + 1] < fv[istar] - 1e-15) ++istar;
        rep_out.curve = curve;
        rep_out.objective_values = fv;
        rep_out.measured_slope = slope;
        rep_out.t_star = curve.grid(istar);
        if (rep_out.t_star <= 0) {
            fail_note = "objective not decreasing on the first interval";
            continue;
        }
        return rep_out;
    }
    throw std::runtime_error("descent_path: failed to achieve a negative initial slope (" +
                             fail_note + ")");
}

double backtracking_t(const DescentReport& report, double armijo) {
    const auto& c = report.curve;
    const auto& fv = report.objective_values;
    if (fv.empty()) return 0.0;
    const double f0 = fv.front();
    const double drop = -report.measured_slope * c.deriv.front().norm();
    double t = 1.0;
    for (int it = 0; it < 60; ++it) {
        // nearest grid node at parameter t
        const int i =
            std::min(static_cast<int>(std::round(t * (c.size() - 1))), c.size() - 1);
        if (fv[i] <= f0 - armijo * t * drop && i > 0) return c.grid(i);
        t *= 0.5;
    }
    return 0.0;
}

}  // namespace vgeo
