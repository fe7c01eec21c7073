#include "vgeo/cones.hpp"

#include "vgeo/paths.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace vgeo {

namespace {

double golden_max_1d(const std::function<double(double)>& g, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > tol) {
        if (fc > fd) {
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

// smallest ||J^T y|| over unit y in the normal cone at Fb; generators plus
// pairwise arcs plus a projected-gradient polish
std::pair<Vec, double> dual_witness(const Mat& J, const NormalCone& nc) {
    std::vector<Vec> cands;
    for (const auto& r : nc.rays) cands.push_back(r);
    if (nc.subspace.cols() > 0) {
        // restrict to the subspace: smallest singular direction of J^T S
        Mat JS = J.transpose() * nc.subspace;
        Eigen::JacobiSVD<Mat> svd(JS, Eigen::ComputeFullV);
        Vec beta = svd.matrixV().col(svd.matrixV().cols() - 1);
        cands.push_back((nc.subspace * beta).normalized());
        for (Eigen::Index c = 0; c < nc.subspace.cols(); ++c) {
            cands.push_back(nc.subspace.col(c));
            cands.push_back(-nc.subspace.col(c));
        }
    }
    const size_t base = cands.size();
    for (size_t i = 0; i < base; ++i)
        for (size_t j = i + 1; j < base; ++j) {
            const Vec a = cands[i], b = cands[j];
            auto g = [&](double th) {
                Vec y = std::cos(th) * a + std::sin(th) * b;
                const double n = y.norm();
                return n < 1e-14 ? -1e9 : -(J.transpose() * (y / n)).norm();
            };
            const double th = golden_max_1d(g, 0.0, M_PI / 2, 1e-12);
            Vec y = std::cos(th) * a + std::sin(th) * b;
            if (y.norm() > 1e-12) cands.push_back(y.normalized());
        }
    Vec best;
    double best_res = std::numeric_limits<double>::infinity();
    for (const auto& y : cands) {
        const double r = (J.transpose() * y).norm();
        if (r < best_res) {
            best_res = r;
            best = y;
        }
    }
    return {best, best_res};
}

}  // namespace

CQCertificate check_cq(const AmenableRep& rep, double tol) {
    const Vec Fb = rep.F()(rep.base);
    if ((Fb - rep.D().project(Fb)).norm() > 1e-7)
        throw std::invalid_argument("check_cq: F(base) not in D");

    if (!rep.D().has_interior()) {
        // run the dual test on the affine-hull reduction
        try {
            Reduction red = reduce_representation(rep);
            if (red.k == 0) {
                CQCertificate cert;
                cert.status = CQStatus::Holds;
                cert.reduced = true;
                Eigen::JacobiSVD<Mat> svd(red.chart.base_jacobian());
                cert.delta = svd.singularValues().minCoeff();
                cert.lambda = 0.0;
                cert.note = "equality representation: surjective constraint Jacobian";
                return cert;
            }
            CQCertificate cert = check_cq(red.reduced, tol);
            cert.reduced = true;
            cert.note = "certified on the affine-hull reduction";
            return cert;
        } catch (const RankDeficiency& rd) {
            CQCertificate cert;
            cert.status = CQStatus::Fails;
            cert.reduced = true;
            cert.y = rd.witness;
            cert.dual_residual = (rep.base_jacobian.transpose() * rd.witness).norm();
            cert.note = "rank-deficient equality block";
            return cert;
        }
    }

    const Mat J = rep.base_jacobian;
    const int n = rep.F().domain_dim;
    const double rho = 1.0;  // trust region for r
    auto margin = [&](const Vec& r) { return rep.D().interior_margin(Fb + J * r); };

    // direction sweep with concave 1-D maximization, then subgradient polish
    std::vector<Vec> dirs = unit_directions(n, 64, 42);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e(i) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    Vec best_r = Vec::Zero(n);
    double best_m = margin(best_r);
    for (const auto& u : dirs) {
        auto g = [&](double t) { return margin(Vec(t * u)); };
        const double t = golden_max_1d(g, 0.0, rho, 1e-12);
        if (g(t) > best_m) {
            best_m = g(t);
            best_r = t * u;
        }
    }
    // projected supergradient ascent, 16 restarts along perturbed seeds
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int restart = 0; restart < 16; ++restart) {
        Vec r = best_r;
        if (restart > 0) {
            Vec p(n);
            for (int i = 0; i < n; ++i) p(i) = gauss(rng);
            r += 0.2 * rho * p;
            if (r.norm() > rho) r *= rho / r.norm();
        }
        for (int it = 0; it < 200; ++it) {
            // numeric supergradient of the concave margin
            Vec g(n);
            const double h = 1e-7;
            for (int i = 0; i < n; ++i) {
                Vec rp = r, rm = r;
                rp(i) += h;
                rm(i) -= h;
                g(i) = (margin(rp) - margin(rm)) / (2 * h);
            }
            const double step = rho / (3.0 * std::sqrt(it + 1.0));
            r += step * (g.norm() > 1e-14 ? Vec(g / g.norm()) : g);
            if (r.norm() > rho) r *= rho / r.norm();
            const double m = margin(r);
            if (m > best_m) {
                best_m = m;
                best_r = r;
            }
        }
    }

    CQCertificate cert;
    if (best_m > tol && best_r.norm() > 1e-14) {
        cert.status = CQStatus::Holds;
        cert.lambda = best_r.norm();
        cert.w = best_r / cert.lambda;
        cert.delta = best_m;
        return cert;
    }
    cert.status = CQStatus::Fails;
    auto [y, res] = dual_witness(J, rep.D().normal_cone(Fb, 1e-9));
    cert.y = y;
    cert.dual_residual = res;
    return cert;
}

bool verify_cq_certificate(const AmenableRep& rep, const CQCertificate& cert, int samples,
                           std::uint64_t seed) {
    const Vec Fb = rep.F()(rep.base);
    if (cert.status == CQStatus::Holds) {
        if (cert.w.size() == 0) return cert.delta > 0;  // equality representation
        const Vec center = Fb + cert.lambda * (rep.base_jacobian * cert.w);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const int m = rep.F().codomain_dim;
        for (int s = 0; s < samples; ++s) {
            Vec p(m);
            for (int i = 0; i < m; ++i) p(i) = gauss(rng);
            if (p.norm() < 1e-14) continue;
            p *= cert.delta * std::pow(u01(rng), 1.0 / m) / p.norm();
            if (!rep.D().contains(Vec(center + p), 1e-9)) return false;
        }
        return true;
    }
    if (cert.y.size() == 0 || cert.y.norm() < 1e-12) return false;
    // y must be a normal of D at F(base) and annihilate the range of J
    if (cert.dual_residual > 1e-6) return false;
    const Vec step = Fb + 1e-6 * cert.y;
    return (rep.D().project(step) - step).dot(cert.y) <= 1e-12;
}

ConeSample tangent_cone_amenable(const AmenableRep& rep, const Vec& x, int dirs, double tol,
                                 std::uint64_t seed) {
    AmenableRep at_x = rep;
    at_x.base = x;
    at_x.base_jacobian = rep.F().jacobian(x);
    CQCertificate cert = check_cq(at_x);
    if (cert.status != CQStatus::Holds)
        throw std::runtime_error("tangent_cone_amenable: CQ fails at the query point");

    const Vec Fx = rep.F()(x);
    const Mat J = at_x.base_jacobian;
    ConeSample out;
    out.base = x;
    out.kind = ConeKind::Tangent;

    // equality block of D (affine-hull complement); sampled directions are
    // also snapped onto its kernel, otherwise measure-zero cones like T_{{0}}
    // are never hit
    const AffineHull hull = rep.D().affine_hull();
    Mat Aeq(0, rep.F().domain_dim);
    if (hull.dim() < rep.D().dim()) {
        Mat P = Mat::Identity(rep.D().dim(), rep.D().dim()) - hull.basis * hull.basis.transpose();
        Eigen::ColPivHouseholderQR<Mat> qr(P);
        Mat Qperp = qr.householderQ() * Mat::Identity(rep.D().dim(), rep.D().dim() - hull.dim());
        Aeq = Qperp.transpose() * J;
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(Aeq);

    for (const auto& u : unit_directions(rep.F().domain_dim, dirs, seed)) {
        if (rep.D().tangent_contains(Fx, Vec(J * u), tol)) {
            out.directions.push_back(u);
            continue;
        }
        if (Aeq.rows() > 0) {
            Vec snapped = u - cod.solve(Vec(Aeq * u));
            if (snapped.norm() > 1e-9) {
                snapped.normalize();
                if (rep.D().tangent_contains(Fx, Vec(J * snapped), tol))
                    out.directions.push_back(snapped);
            }
        }
    }
    return out;
}

ConeSample regular_normal_sample(const SetOracle& C, const Vec& x, double radius, int samples,
                                 double tol, std::uint64_t seed) {
    if (!C.membership(x, 1e-7)) throw std::invalid_argument("regular_normal_sample: x not in C");
    constexpr int kLevels = 4;
    std::vector<std::vector<Vec>> rays(kLevels);
    for (int j = 0; j < kLevels; ++j) {
        const double r = radius / std::pow(4.0, j);
        auto pts = C.sample_near(x, r, 240, seed + j);
        if (static_cast<int>(pts.size()) < 10)
            throw std::runtime_error(
                "regular_normal_sample: fewer than 10 set samples at radius " + std::to_string(r));
        for (const auto& p : pts) {
            const double d = (p - x).norm();
            if (d > 1e-12) rays[j].push_back((p - x) / d);
        }
    }

    auto sup_ratio = [&](const Vec& v, int level) {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& r : rays[level]) s = std::max(s, v.dot(r));
        return s;
    };
    auto decays = [&](const Vec& v) {
        double prev = sup_ratio(v, 0);
        for (int j = 1; j < kLevels; ++j) {
            const double s = sup_ratio(v, j);
            if (!(s <= std::max(0.5 * prev, tol))) return false;
            prev = s;
        }
        return true;
    };

    // raw candidates plus Chebyshev-refined ones: minimize the sup support
    // ratio at the finest level (subgradient steps on the sphere), so that
    // exactly-normal directions exist in the pool
    std::vector<Vec> candidates = unit_directions(C.dim, samples, seed);
    std::vector<std::pair<double, Vec>> scored;
    for (const auto& v : candidates) scored.emplace_back(sup_ratio(v, kLevels - 1), v);
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const int refine_starts = std::min<int>(8, static_cast<int>(scored.size()));
    for (int s = 0; s < refine_starts; ++s) {
        Vec v = scored[s].second;
        for (int it = 0; it < 120; ++it) {
            const Vec* worst = nullptr;
            double bestdot = -std::numeric_limits<double>::infinity();
            for (const auto& r : rays[kLevels - 1])
                if (v.dot(r) > bestdot) {
                    bestdot = v.dot(r);
                    worst = &r;
                }
            if (!worst || bestdot <= 0) break;
            v -= (0.8 / std::sqrt(it + 1.0)) * *worst;
            const double n = v.norm();
            if (n < 1e-9) break;
            v /= n;
        }
        if (v.norm() > 0.5) candidates.push_back(v);
    }

    ConeSample out;
    out.base = x;
    out.kind = ConeKind::RegularNormal;
    for (const auto& v : candidates)
        if (decays(v)) out.directions.push_back(v);
    return out;
}

}  // namespace vgeo
