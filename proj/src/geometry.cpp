#include "vgeo/geometry.hpp"

#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

namespace vgeo {

void SampledCurve::validate() const {
    if (points.size() < 3) throw std::invalid_argument("curve: need N >= 2 intervals");
    if (grid.size() != static_cast<Eigen::Index>(points.size()))
        throw std::invalid_argument("curve: grid/point count mismatch");
    if (std::abs(grid(0)) > 1e-14 || std::abs(grid(grid.size() - 1) - 1.0) > 1e-14)
        throw std::invalid_argument("curve: grid must cover [0,1]");
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
        if (!(grid(i) < grid(i + 1))) throw std::invalid_argument("curve: grid not increasing");
    const int n = dim();
    for (const auto& p : points) {
        if (p.size() != n) throw std::invalid_argument("curve: mixed dimensions");
        if (!p.allFinite()) throw std::invalid_argument("curve: non-finite point");
    }
}

double polyline_length(const Polyline& pts) {
    double len = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) len += (pts[i + 1] - pts[i]).norm();
    return len;
}

double curve_length(const SampledCurve& c) { return polyline_length(c.points); }

std::vector<Vec> fd_derivative(const std::vector<Vec>& points, const Eigen::VectorXd& grid) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw std::invalid_argument("fd_derivative: need at least 3 nodes");
    if (grid.size() != n) throw std::invalid_argument("fd_derivative: grid size mismatch");
    for (int i = 0; i + 1 < n; ++i)
        if (!(grid(i) < grid(i + 1))) throw std::invalid_argument("fd_derivative: non-monotone grid");

    // Lagrange differentiation weights on a 3-node stencil; exact for
    // quadratics on any spacing.
    auto stencil = [&](int a, int b, int c, double t) {
        const double ta = grid(a), tb = grid(b), tc = grid(c);
        const double wa = ((t - tb) + (t - tc)) / ((ta - tb) * (ta - tc));
        const double wb = ((t - ta) + (t - tc)) / ((tb - ta) * (tb - tc));
        const double wc = ((t - ta) + (t - tb)) / ((tc - ta) * (tc - tb));
        return Vec(wa * points[a] + wb * points[b] + wc * points[c]);
    };

    std::vector<Vec> d(n);
    d[0] = stencil(0, 1, 2, grid(0));
    for (int i = 1; i + 1 < n; ++i) d[i] = stencil(i - 1, i, i + 1, grid(i));
    d[n - 1] = stencil(n - 3, n - 2, n - 1, grid(n - 1));
    return d;
}

double default_fd_step(const Vec& x) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::cbrt(eps) * std::max(1.0, x.norm());
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x, double h) {
    if (h <= 0.0) h = default_fd_step(x);
    const Vec f0 = F(x);
    Mat J(f0.size(), x.size());
    Vec xp = x, xm = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        xp(j) = x(j) + h;
        xm(j) = x(j) - h;
        const Vec fp = F(xp), fm = F(xm);
        if (!fp.allFinite() || !fm.allFinite())
            throw std::runtime_error("fd_jacobian: evaluation failed inside the stencil");
        J.col(j) = (fp - fm) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

Eigen::VectorXd uniform_grid(int nodes) {
    if (nodes < 3) throw std::invalid_argument("uniform_grid: need >= 3 nodes");
    Eigen::VectorXd g(nodes);
    for (int i = 0; i < nodes; ++i) g(i) = static_cast<double>(i) / (nodes - 1);
    g(nodes - 1) = 1.0;
    return g;
}

SampledCurve sample_curve(const std::function<Vec(double)>& f, int nodes,
                          const std::function<Vec(double)>* velocity, const std::string& meta) {
    SampledCurve c;
    c.grid = uniform_grid(nodes);
    c.points.resize(nodes);
    for (int i = 0; i < nodes; ++i) c.points[i] = f(c.grid(i));
    if (velocity) {
        c.deriv.resize(nodes);
        for (int i = 0; i < nodes; ++i) c.deriv[i] = (*velocity)(c.grid(i));
    } else {
        c.deriv = fd_derivative(c.points, c.grid);
    }
    c.meta = meta;
    return c;
}

std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed) {
    // Kronecker lattice seeded offset; inverse-normal map gives a
    // reproducible spread over the sphere.
    std::vector<Vec> dirs;
    dirs.reserve(count);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Vec offset(dim);
    for (int j = 0; j < dim; ++j) offset(j) = u01(rng);
    // per-coordinate irrational strides (sqrt of primes)
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    auto inv_normal = [](double p) {
        // Acklam-style rational approximation, fine for direction spreading
        if (p <= 0.0) p = 1e-12;
        if (p >= 1.0) p = 1.0 - 1e-12;
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        const double plow = 0.02425, phigh = 1 - plow;
        double q, r;
        if (p < plow) {
            q = std::sqrt(-2 * std::log(p));
            return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        if (p > phigh) {
            q = std::sqrt(-2 * std::log(1 - p));
            return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    };
    for (int i = 0; i < count; ++i) {
        Vec v(dim);
        for (int j = 0; j < dim; ++j) {
            double t = offset(j) + (i + 1) * std::sqrt(primes[j % 12]);
            t -= std::floor(t);
            v(j) = inv_normal(t);
        }
        double nv = v.norm();
        if (nv < 1e-12) {
            v.setZero();
            v(0) = 1.0;
            nv = 1.0;
        }
        dirs.push_back(v / nv);
    }
    return dirs;
}

std::vector<Vec> latin_hypercube(const Vec& lo, const Vec& hi, int count, std::uint64_t seed) {
    const int dim = static_cast<int>(lo.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<std::vector<int>> perms(dim, std::vector<int>(count));
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < count; ++i) perms[j][i] = i;
        for (int i = count - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(perms[j][i], perms[j][pick(rng)]);
        }
    }
    std::vector<Vec> pts(count, Vec(dim));
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j) {
            const double u = (perms[j][i] + u01(rng)) / count;
            pts[i](j) = lo(j) + u * (hi(j) - lo(j));
        }
    return pts;
}

double max_second_difference(const SampledCurve& c, int stride) {
    double s = 0.0;
    const int n = c.size();
    for (int i = stride; i + stride < n; i += stride)
        s = std::max(s, (c.points[i - stride] - 2.0 * c.points[i] + c.points[i + stride]).norm());
    return s;
}

double second_difference_order(const std::function<Vec(double)>& f, int nodes) {
    // S(h) at three dyadic resolutions; average decay exponent.
    auto sdiff = [&](int n) {
        double s = 0.0;
        const double h = 1.0 / (n - 1);
        Vec prev = f(0.0), cur = f(h);
        for (int i = 1; i + 1 < n; ++i) {
            Vec next = f((i + 1) * h);
            s = std::max(s, (prev - 2.0 * cur + next).norm());
            prev = cur;
            cur = next;
        }
        return s;
    };
    const double s0 = sdiff(nodes), s1 = sdiff(2 * (nodes - 1) + 1), s2 = sdiff(4 * (nodes - 1) + 1);
    const double floor_val = 1e-14;
    if (s0 < floor_val) return 2.0;  // flat curve, treat as smooth
    const double p1 = std::log2(std::max(s0, floor_val) / std::max(s1, floor_val));
    const double p2 = std::log2(std::max(s1, floor_val) / std::max(s2, floor_val));
    return 0.5 * (p1 + p2);
}

int ParallelConfig::threads() {
    const char* env = std::getenv("VGEO_THREADS");
    if (!env) return 1;
    const int t = std::atoi(env);
    return t > 0 ? t : 1;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    const int nthreads = std::min(ParallelConfig::threads(), n);
    if (nthreads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        futs.push_back(std::async(std::launch::async, [&, t]() {
            for (int i = t; i < n; i += nthreads) body(i);
        }));
    }
    for (auto& f : futs) f.get();
}

}  // namespace vgeo
