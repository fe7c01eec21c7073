#include "vgeo/paths.hpp"

#include "vgeo/cones.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vgeo {

namespace {
constexpr double kGNTol = 1e-10;
constexpr int kGNMaxIter = 20;
}  // namespace

Chart::Chart(Vec base, SmoothMap F2) : base_(std::move(base)), F2_(std::move(F2)) {
    J20_ = F2_.jacobian(base_);
    Eigen::JacobiSVD<Mat> svd(J20_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int m2 = static_cast<int>(J20_.rows());
    const int n = static_cast<int>(J20_.cols());
    const double smin = m2 == 0 ? 1.0 : svd.singularValues().minCoeff();
    if (smin <= 1e-8) {
        Vec w = svd.matrixU().col(m2 - 1);
        throw RankDeficiency("chart: rank-deficient equality Jacobian", w);
    }
    tangent_ = svd.matrixV().rightCols(n - m2);
    pinv_ = svd.matrixV().leftCols(m2) *
            svd.singularValues().head(m2).cwiseInverse().asDiagonal() *
            svd.matrixU().transpose();

    // empirical convergence radius of the corrector: double until round-trip
    // or correction fails
    double r = 1e-3;
    double good = 0.0;
    for (int it = 0; it < 40 && r < 1e3; ++it) {
        bool ok = true;
        for (const auto& u : unit_directions(coord_dim(), 8, 7)) {
            try {
                validity_radius_ = 1e300;  // allow probing
                const Vec x = to_manifold(Vec(r * u));
                if ((to_coords(x) - r * u).norm() > 1e-8 * std::max(1.0, r)) ok = false;
            } catch (const std::runtime_error&) {
                ok = false;
            }
            if (!ok) break;
        }
        if (!ok) break;
        good = r;
        r *= 2.0;
    }
    validity_radius_ = good > 0 ? good : 1e-3;
}

Vec Chart::to_manifold(const Vec& u) const {
    if (u.norm() > 4.0 * validity_radius_)
        throw std::runtime_error("chart: coordinates outside the validity ball");
    Vec y = base_ + tangent_ * u;
    if (F2_.codomain_dim == 0) return y;
    for (int it = 0; it < kGNMaxIter; ++it) {
        const Vec r = F2_(y);
        if (r.norm() <= kGNTol) return y;
        y -= pinv_ * r;
    }
    if (F2_(y).norm() <= 100 * kGNTol) return y;
    throw std::runtime_error("chart: corrector did not converge (domain exit)");
}

Vec Chart::to_coords(const Vec& x) const { return tangent_.transpose() * (x - base_); }

Mat Chart::jacobian(const Vec& u) const {
    auto f = [this](const Vec& v) { return to_manifold(v); };
    return fd_jacobian(f, u, std::max(1e-7, 1e-7 * u.norm()));
}

Reduction reduce_representation(const AmenableRep& rep) {
    const ConvexBody& D = rep.D();
    if (D.has_interior())
        throw std::invalid_argument("int(D) nonempty; reduction not applicable");
    const AffineHull hull = D.affine_hull();
    const int m = D.dim();
    const int k = hull.dim();

    Reduction red;
    red.k = k;
    red.Q = hull.basis;
    red.d0 = hull.point;
    // orthogonal complement of the hull directions
    Mat P = Mat::Identity(m, m) - red.Q * red.Q.transpose();
    Eigen::ColPivHouseholderQR<Mat> qr(P);
    red.Qperp = qr.householderQ() * Mat::Identity(m, m - k);

    const SmoothMap& F = rep.F();
    const Mat Qp = red.Qperp;
    const Vec d0 = red.d0;
    SmoothMap F2;
    F2.domain_dim = F.domain_dim;
    F2.codomain_dim = m - k;
    F2.eval = [F, Qp, d0](const Vec& x) { return Vec(Qp.transpose() * (F(x) - d0)); };
    F2.jac = [F, Qp](const Vec& x) { return Mat(Qp.transpose() * F.jacobian(x)); };

    red.chart = Chart(rep.base, F2);   // throws RankDeficiency when CQ must fail

    const Chart chart = red.chart;
    const Mat Q = red.Q;
    SmoothMap Ft;
    Ft.domain_dim = chart.coord_dim();
    Ft.codomain_dim = k;
    Ft.eval = [F, Q, d0, chart](const Vec& u) {
        return Vec(Q.transpose() * (F(chart.to_manifold(u)) - d0));
    };

    ConvexBody Dt = k == 0 ? ConvexBody::box(Vec(0), Vec(0)) : D.reduce_to_affine_coords();
    SetOracle reduced_oracle = SetOracle::preimage(
        Ft, Dt, Vec::Zero(chart.coord_dim()), chart.validity_radius());
    reduced_oracle.name = rep.oracle.name + "~reduced";
    red.reduced = AmenableRep::make(std::move(reduced_oracle), Vec::Zero(chart.coord_dim()));
    return red;
}

SampledCurve segment_curve(const Vec& x, const Vec& xp, int nodes) {
    SampledCurve c;
    c.grid = uniform_grid(nodes);
    c.points.resize(nodes);
    c.deriv.resize(nodes);
    const Vec d = xp - x;
    for (int i = 0; i < nodes; ++i) {
        c.points[i] = x + c.grid(i) * d;
        c.deriv[i] = d;
    }
    c.meta = "segment";
    return c;
}

SampledCurve build_eps_path_interior(const AmenableRep& rep, const Vec& x, const Vec& xp,
                                     double eps, const PathOptions& opts) {
    if (!rep.D().has_interior())
        throw std::invalid_argument("build_eps_path_interior: int(D) is empty");
    const CQCertificate cert = check_cq(rep);
    if (cert.status != CQStatus::Holds)
        throw std::runtime_error("build_eps_path_interior: CQ fails at the base point");
    if ((x - xp).norm() < 1e-15) {
        SampledCurve c = segment_curve(x, x, opts.nodes);
        c.meta = "constant";
        return c;
    }

    const Vec w = cert.w;
    const double scale = eps * (x - xp).norm();
    SampledCurve c;
    c.grid = uniform_grid(opts.nodes);
    c.points.resize(opts.nodes);
    c.deriv.resize(opts.nodes);
    const Vec d = xp - x;
    for (int i = 0; i < opts.nodes; ++i) {
        const double t = c.grid(i);
        c.points[i] = x + t * d + scale * t * (1 - t) * w;
        c.deriv[i] = d + scale * (1 - 2 * t) * w;
    }
    c.points.front() = x;
    c.points.back() = xp;
    c.meta = "interior-formula";

    // strict interior feasibility at every internal sample
    for (int i = 1; i + 1 < opts.nodes; ++i) {
        const Vec Fy = rep.F()(c.points[i]);
        if (rep.D().interior_margin(Fy) <= 0.0) {
            std::ostringstream os;
            os << "build_eps_path_interior: interior feasibility violated at t=" << c.grid(i)
               << "; shrink the pair neighborhood";
            throw std::runtime_error(os.str());
        }
    }
    return c;
}

namespace {
SampledCurve pushforward_impl(const std::function<Vec(const Vec&)>& H,
                              const std::function<Mat(const Vec&)>& dH,
                              const SampledCurve& gamma) {
    SampledCurve out;
    out.grid = gamma.grid;
    out.points.resize(gamma.size());
    out.deriv.resize(gamma.size());
    for (int i = 0; i < gamma.size(); ++i) {
        out.points[i] = H(gamma.points[i]);
        out.deriv[i] = dH(gamma.points[i]) * gamma.deriv[i];
    }
    out.meta = gamma.meta + "+pushforward";
    return out;
}
}  // namespace

SampledCurve pushforward_path(const Chart& chart, const SampledCurve& gamma) {
    return pushforward_impl([&](const Vec& u) { return chart.to_manifold(u); },
                            [&](const Vec& u) { return chart.jacobian(u); }, gamma);
}

SampledCurve pushforward_path(const SmoothMap& embedding, const SampledCurve& gamma) {
    return pushforward_impl([&](const Vec& u) { return embedding(u); },
                            [&](const Vec& u) { return embedding.jacobian(u); }, gamma);
}

EpsPathReport verify_eps_path(const SampledCurve& gamma, const SetOracle& C, const Vec& x,
                              const Vec& xp, double eps, const PathOptions& opts) {
    EpsPathReport r;
    r.requested_eps = eps;
    const Vec d = xp - x;
    r.chord = d.norm();
    r.length = curve_length(gamma);
    r.endpoint_error =
        std::max((gamma.points.front() - x).norm(), (gamma.points.back() - xp).norm());

    double feas = 0.0;
    for (const auto& p : gamma.points) feas = std::max(feas, C.residual(p));
    r.feasibility_residual_max = feas;

    if (r.chord < 1e-15) {
        r.achieved = 0.0;
        for (const auto& g : gamma.deriv) r.achieved = std::max(r.achieved, g.norm());
        r.passed = r.achieved <= eps + opts.tol && feas <= opts.feas_tol &&
                   r.endpoint_error <= 10 * opts.feas_tol;
        r.note = "degenerate pair";
        return r;
    }

    double dev = 0.0, ml = 0.0, mq = 0.0;
    for (int i = 0; i < gamma.size(); ++i) {
        const double t = gamma.grid(i);
        dev = std::max(dev, (gamma.deriv[i] - d).norm() / r.chord);
        const Vec line = x + t * d;
        const double e = (gamma.points[i] - line).norm();
        if (t > 1e-12) ml = std::max(ml, e / (t * r.chord));
        if (t > 1e-12 && 1 - t > 1e-12) mq = std::max(mq, e / (2 * t * (1 - t) * r.chord));
    }
    r.achieved = dev;
    r.midline_linear = ml;
    r.midline_quadratic = mq;

    const bool len_ok = r.length <= (1 + eps) * r.chord + 1e-12;
    const double slack = 1 + 1e-9;
    r.passed = dev <= eps * slack + opts.tol && ml <= eps * slack + opts.tol &&
               mq <= eps * slack + opts.tol && len_ok && feas <= opts.feas_tol &&
               r.endpoint_error <= 10 * opts.feas_tol;
    if (!len_ok) r.note = "length bound failed";
    return r;
}

std::pair<SampledCurve, EpsPathReport> build_eps_path(const AmenableRep& rep, const Vec& x,
                                                      const Vec& xp, double eps,
                                                      const PathOptions& opts) {
    if (rep.oracle.residual(x) > opts.feas_tol || rep.oracle.residual(xp) > opts.feas_tol)
        throw std::invalid_argument("build_eps_path: endpoints not feasible");

    if ((x - xp).norm() < 1e-15) {
        SampledCurve c = segment_curve(x, x, opts.nodes);
        c.meta = "constant";
        return {c, verify_eps_path(c, rep.oracle, x, xp, eps, opts)};
    }

    // the straight segment realizes eps_eff = 0 whenever feasible
    {
        SampledCurve seg = segment_curve(x, xp, opts.nodes);
        bool ok = true;
        for (const auto& p : seg.points)
            if (rep.oracle.residual(p) > opts.feas_tol) {
                ok = false;
                break;
            }
        if (ok) return {seg, verify_eps_path(seg, rep.oracle, x, xp, eps, opts)};
    }

    if (rep.D().has_interior()) {
        SampledCurve c = build_eps_path_interior(rep, x, xp, eps, opts);
        EpsPathReport rep_out = verify_eps_path(c, rep.oracle, x, xp, eps, opts);
        if (!rep_out.passed)
            throw std::runtime_error(
                "build_eps_path: interior-formula path failed verification (achieved " +
                std::to_string(rep_out.achieved) + "); shrink the pair neighborhood");
        return {c, rep_out};
    }

    // affine-hull reduction, path in chart coordinates, pushforward
    Reduction red = reduce_representation(rep);
    const Vec u = red.chart.to_coords(x);
    const Vec up = red.chart.to_coords(xp);
    if ((red.chart.to_manifold(u) - x).norm() > 1e-6 ||
        (red.chart.to_manifold(up) - xp).norm() > 1e-6)
        throw std::runtime_error("build_eps_path: endpoints outside the chart validity ball");

    SampledCurve base;
    if (red.k == 0) {
        base = segment_curve(u, up, opts.nodes);
        base.meta = "chart-geodesic";
    } else {
        double eps_chart = eps;
        base = build_eps_path(red.reduced, u, up, eps_chart, opts).first;
    }
    SampledCurve c = pushforward_path(red.chart, base);
    c.points.front() = x;
    c.points.back() = xp;
    EpsPathReport rep_out = verify_eps_path(c, rep.oracle, x, xp, eps, opts);
    if (!rep_out.passed)
        throw std::runtime_error(
            "build_eps_path: chart path failed verification (achieved " +
            std::to_string(rep_out.achieved) + "); shrink the pair neighborhood");
    return {c, rep_out};
}

double certify_radius(const AmenableRep& rep, double eps, const PathOptions& opts) {
    double delta = rep.radius();
    if (!std::isfinite(delta) || delta <= 0) delta = 1.0;
    // seed from the proof constants when an interior certificate exists
    if (rep.D().has_interior()) {
        const CQCertificate cert = check_cq(rep);
        if (cert.status == CQStatus::Holds && cert.lambda > 0)
            delta = std::min(delta, 4.0 * cert.lambda / std::max(eps, 1e-6));
    }
    PathOptions probe_opts = opts;
    probe_opts.nodes = 257;
    for (int halving = 0; halving < 48; ++halving) {
        std::vector<Vec> members = rep.oracle.sample_near(rep.base, delta / 2, 12, 42);
        bool ok = members.size() >= 2;
        for (size_t i = 0; ok && i + 1 < members.size(); i += 2) {
            try {
                auto [c, r] = build_eps_path(rep, members[i], members[i + 1], eps, probe_opts);
                ok = r.passed;
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (ok && members.size() >= 2) return delta;
        delta *= 0.5;
    }
    throw std::runtime_error("certify_radius: no verified scale found");
}

}  // namespace vgeo
