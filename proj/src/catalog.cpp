#include "vgeo/catalog.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vgeo {

namespace {
constexpr double kPi = 3.14159265358979323846;

int sawtooth_tooth(double x) {
    // k >= 1 with x in (2^-(k+1), 2^-k], or 0 when x is outside all teeth
    if (x <= 0.0 || x > 0.5) return 0;
    int k = static_cast<int>(std::floor(std::log2(1.0 / x)));
    // guard rounding at dyadic boundaries
    while (k >= 1 && x > std::ldexp(1.0, -k)) --k;
    while (x <= std::ldexp(1.0, -(k + 1))) ++k;
    return k < 1 ? 0 : k;
}
}  // namespace

double sawtooth(double x) {
    const int k = sawtooth_tooth(x);
    if (k == 0) return 0.0;
    const double lo = std::ldexp(1.0, -(k + 1));   // 2^-(k+1)
    const double hi = std::ldexp(1.0, -k);         // 2^-k
    const double apex = 3.0 * std::ldexp(1.0, -(k + 2));
    const double slope = std::ldexp(1.0, -k);
    return x <= apex ? slope * (x - lo) : slope * (hi - x);
}

namespace {

Polyline densify(const std::function<Vec(double)>& p, double a, double b, int segs) {
    Polyline out;
    out.reserve(segs + 1);
    for (int i = 0; i <= segs; ++i) out.push_back(p(a + (b - a) * i / double(segs)));
    return out;
}

Polyline concat(Polyline a, const Polyline& b) {
    if (!a.empty() && !b.empty() && (a.back() - b.front()).norm() < 1e-14)
        a.insert(a.end(), b.begin() + 1, b.end());
    else
        a.insert(a.end(), b.begin(), b.end());
    return a;
}

// corner breakpoints of the sawtooth graph inside (0, b], finest first
std::vector<double> sawtooth_breaks(double b) {
    std::vector<double> xs;
    const int kmin = std::max(1, sawtooth_tooth(std::min(b, 0.5)));
    for (int k = kmin + 46; k >= kmin; --k) {
        const double lo = std::ldexp(1.0, -(k + 1));
        const double apex = 3.0 * std::ldexp(1.0, -(k + 2));
        const double hi = std::ldexp(1.0, -k);
        for (double v : {lo, apex, hi})
            if (v > 0 && v < b) xs.push_back(v);
    }
    return xs;
}

Polyline graph_walk(const std::function<double(double)>& f, double xa, double xb,
                    const std::vector<double>& breaks, int segs_per_piece) {
    const double lo = std::min(xa, xb), hi = std::max(xa, xb);
    std::vector<double> xs;
    xs.push_back(lo);
    for (double b : breaks)
        if (b > lo && b < hi) xs.push_back(b);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    Polyline out;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        for (int s = (i == 0 ? 0 : 1); s <= segs_per_piece; ++s) {
            const double x = xs[i] + (xs[i + 1] - xs[i]) * s / double(segs_per_piece);
            out.push_back(vec2(x, f(x)));
        }
    }
    if (xa > xb) std::reverse(out.begin(), out.end());
    return out;
}

SetOracle make_parabola_pair() {
    ParametricBranch up{[](double t) { return vec2(t, t * t); }, -1.5, 1.5};
    ParametricBranch down{[](double t) { return vec2(t, -t * t); }, -1.5, 1.5};
    SetOracle s = SetOracle::curve_union({up, down}, 2);
    s.name = "parabola-pair";
    s.mirror_axis = 1;
    s.witness_family = [](int k, Vec& x, Vec& xp, Vec& v) {
        if (k < 1) return false;
        x = vec2(1.0 / k, 1.0 / (double(k) * k));
        xp = vec2(1.0 / k, -1.0 / (double(k) * k));
        v = vec2(2.0 / k, -1.0);
        return true;
    };
    s.exact_normal_rays = [](const Vec& x) {
        std::vector<Vec> rays;
        if (std::abs(x(1) - x(0) * x(0)) < 1e-9) {
            Vec n = vec2(-2.0 * x(0), 1.0).normalized();
            rays.push_back(n);
            rays.push_back(-n);
        }
        if (std::abs(x(1) + x(0) * x(0)) < 1e-9) {
            Vec n = vec2(2.0 * x(0), 1.0).normalized();
            rays.push_back(n);
            rays.push_back(-n);
        }
        return rays;
    };
    s.exact_curve = [](const Vec& a, const Vec& b) {
        auto on_up = [](const Vec& p) { return std::abs(p(1) - p(0) * p(0)) < 1e-9; };
        auto up = [](double t) { return vec2(t, t * t); };
        auto down = [](double t) { return vec2(t, -t * t); };
        const bool au = on_up(a), bu = on_up(b);
        const int segs = 512;
        if (au == bu) {
            auto br = au ? std::function<Vec(double)>(up) : std::function<Vec(double)>(down);
            // both points may also sit on the other branch at y=0; same arc works
            return densify(br, a(0), b(0), segs);
        }
        auto bra = au ? std::function<Vec(double)>(up) : std::function<Vec(double)>(down);
        auto brb = bu ? std::function<Vec(double)>(up) : std::function<Vec(double)>(down);
        return concat(densify(bra, a(0), 0.0, segs), densify(brb, 0.0, b(0), segs));
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t) {
        std::vector<Vec> out;
        const int m = 6 * count;
        for (int i = 0; i <= m; ++i) {
            const double t = x(0) - r + 2.0 * r * i / m;
            for (const Vec& p : {vec2(t, t * t), vec2(t, -t * t)})
                if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_sawtooth_graph() {
    Vec lo(1), hi(1);
    lo(0) = -0.5;
    hi(0) = 1.0;
    SetOracle s = SetOracle::graph([](const Vec& u) { return sawtooth(u(0)); }, lo, hi);
    s.name = "sawtooth-graph";
    s.exact_curve = [](const Vec& a, const Vec& b) {
        const double m = std::max(std::abs(a(0)), std::abs(b(0)));
        return graph_walk([](double x) { return sawtooth(x); }, a(0), b(0),
                          sawtooth_breaks(std::max(m, 1e-16)), 1);
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t) {
        std::vector<Vec> out;
        const int m = 8 * count;
        for (int i = 0; i <= m; ++i) {
            const double u = x(0) - r + 2.0 * r * i / m;
            Vec p = vec2(u, sawtooth(u));
            if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_sawtooth_epigraph() {
    Vec lo(1), hi(1);
    lo(0) = -0.5;
    hi(0) = 1.0;
    SetOracle s = SetOracle::epigraph([](const Vec& u) { return sawtooth(u(0)); }, lo, hi);
    s.name = "sawtooth-epigraph";
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t seed) {
        std::vector<Vec> out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int i = 0; i < 6 * count && static_cast<int>(out.size()) < count; ++i) {
            const double u = x(0) + r * (2.0 * u01(rng) - 1.0);
            const double base = sawtooth(u);
            const double y = std::max(base, x(1) + r * (2.0 * u01(rng) - 1.0));
            Vec p = vec2(u, y);
            if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_power32_graph() {
    Vec lo(1), hi(1);
    lo(0) = -1.5;
    hi(0) = 1.5;
    SetOracle s = SetOracle::graph(
        [](const Vec& u) { return std::pow(std::abs(u(0)), 1.5); }, lo, hi);
    s.name = "power32-graph";
    s.exact_curve = [](const Vec& a, const Vec& b) {
        return graph_walk([](double x) { return std::pow(std::abs(x), 1.5); }, a(0), b(0),
                          {0.0}, 1024);
    };
    s.exact_normal_rays = [](const Vec& x) {
        const double g = 1.5 * std::sqrt(std::abs(x(0))) * (x(0) >= 0 ? 1.0 : -1.0);
        Vec n = vec2(-g, 1.0).normalized();
        return std::vector<Vec>{n, -n};
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t) {
        std::vector<Vec> out;
        const int m = 8 * count;
        for (int i = 0; i <= m; ++i) {
            const double u = x(0) - r + 2.0 * r * i / m;
            Vec p = vec2(u, std::pow(std::abs(u), 1.5));
            if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_parabola_band() {
    std::vector<ScalarExpr> comps = {parse_expr("x2 - x1^2"), parse_expr("-x2 - x1^2")};
    SmoothMap F = SmoothMap::from_exprs(comps, 2);
    F.jac = [](const Vec& x) {
        Mat J(2, 2);
        J << -2 * x(0), 1, -2 * x(0), -1;
        return J;
    };
    SetOracle s = SetOracle::preimage(F, ConvexBody::orthant(2, -1.0), Vec::Zero(2), 3.0);
    s.name = "parabola-band";
    // projection: inside -> itself; else nearest point over both boundary parabolas
    s.exact_project_multi = [](const Vec& x) {
        std::vector<std::pair<double, Vec>> cands;
        if (std::abs(x(1)) <= x(0) * x(0) + 1e-15) return std::vector<Vec>{x};
        for (double sign : {1.0, -1.0}) {
            auto g = [&](double t) {
                const Vec p = vec2(t, sign * t * t);
                return (p - x).squaredNorm();
            };
            for (double t : minimize_1d_multistart(g, -1.3, 1.3, 1025, 1e-14)) {
                Vec p = vec2(t, sign * t * t);
                cands.emplace_back((p - x).norm(), p);
            }
        }
        std::sort(cands.begin(), cands.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Vec> reps;
        for (const auto& [d, p] : cands) {
            if (d > cands.front().first * 1.05 + 1e-12) break;
            bool dup = false;
            for (const auto& rp : reps)
                if ((rp - p).norm() <= 1e-5) dup = true;
            if (!dup) reps.push_back(p);
        }
        return reps;
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t seed) {
        std::vector<Vec> out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int i = 0; i < 8 * count && static_cast<int>(out.size()) < count; ++i) {
            const double u = x(0) + r * (2.0 * u01(rng) - 1.0);
            const double cap = u * u;
            const double y = -cap + 2.0 * cap * u01(rng);
            Vec p = vec2(u, y);
            if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_quartic_cross() {
    ParametricBranch right{[](double t) { return vec2(t * t, t); }, -0.95, 0.95};
    ParametricBranch left{[](double t) { return vec2(-t * t, t); }, -0.95, 0.95};
    SetOracle s = SetOracle::curve_union({right, left}, 2);
    s.name = "quartic-cross";
    s.exact_curve = [](const Vec& a, const Vec& b) {
        auto right = [](double t) { return vec2(t * t, t); };
        auto left = [](double t) { return vec2(-t * t, t); };
        auto branch_of = [](const Vec& p) { return p(0) >= 0 ? +1 : -1; };
        const int ba = branch_of(a), bb = branch_of(b);
        const int segs = 1024;
        auto bra = ba > 0 ? std::function<Vec(double)>(right) : std::function<Vec(double)>(left);
        auto brb = bb > 0 ? std::function<Vec(double)>(right) : std::function<Vec(double)>(left);
        if (ba == bb) return densify(bra, a(1), b(1), segs);
        return concat(densify(bra, a(1), 0.0, segs), densify(brb, 0.0, b(1), segs));
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t) {
        std::vector<Vec> out;
        const int m = 8 * count;
        for (int i = 0; i <= m; ++i) {
            const double t = -0.95 + 1.9 * i / m;
            for (const Vec& p : {vec2(t * t, t), vec2(-t * t, t)})
                if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_unit_circle() {
    ParametricBranch c{[](double t) { return vec2(std::cos(t), std::sin(t)); }, 0.0, 2.0 * kPi};
    SetOracle s = SetOracle::curve_union({c}, 2);
    s.name = "unit-circle";
    s.exact_project_multi = [](const Vec& x) {
        const double n = x.norm();
        if (n < 1e-12) {
            // degenerate full-circle projection: clustered representative set
            std::vector<Vec> reps;
            for (int i = 0; i < 8; ++i)
                reps.push_back(vec2(std::cos(i * kPi / 4), std::sin(i * kPi / 4)));
            return reps;
        }
        return std::vector<Vec>{Vec(x / n)};
    };
    s.exact_curve = [](const Vec& a, const Vec& b) {
        const double ta = std::atan2(a(1), a(0));
        double tb = std::atan2(b(1), b(0));
        if (tb - ta > kPi) tb -= 2 * kPi;
        if (ta - tb > kPi) tb += 2 * kPi;
        return densify([](double t) { return vec2(std::cos(t), std::sin(t)); }, ta, tb, 2048);
    };
    s.exact_normal_rays = [](const Vec& x) {
        Vec n = x.normalized();
        return std::vector<Vec>{n, -n};
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t) {
        std::vector<Vec> out;
        const double t0 = std::atan2(x(1), x(0));
        const int m = 8 * count;
        for (int i = 0; i <= m; ++i) {
            const double t = t0 - 2 * r + 4.0 * r * i / m;
            Vec p = vec2(std::cos(t), std::sin(t));
            if ((p - x).norm() <= r) out.push_back(p);
        }
        return out;
    };
    return s;
}

SetOracle make_unit_ball() {
    SetOracle s = SetOracle::preimage(SmoothMap::identity(2), ConvexBody::ball(Vec::Zero(2), 1.0),
                                      Vec::Zero(2), 3.0);
    s.name = "unit-ball";
    s.exact_project_multi = [](const Vec& x) {
        const double n = x.norm();
        return std::vector<Vec>{n <= 1.0 ? x : Vec(x / n)};
    };
    s.exact_normal_rays = [](const Vec& x) {
        if (x.norm() < 1.0 - 1e-9) return std::vector<Vec>{};
        return std::vector<Vec>{Vec(x.normalized())};
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t seed) {
        std::vector<Vec> out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(-1.0, 1.0);
        while (static_cast<int>(out.size()) < count) {
            Vec p = vec2(x(0) + r * u01(rng), x(1) + r * u01(rng));
            if (p.norm() <= 1.0 && (p - x).norm() <= r) out.push_back(p);
            if (out.size() > 100000u) break;
        }
        return out;
    };
    return s;
}

SetOracle make_halfplane() {
    Mat A(1, 2);
    A << 0, 1;
    Vec b(1);
    b << 0;
    SetOracle s = SetOracle::preimage(SmoothMap::identity(2), ConvexBody::halfspaces(A, b),
                                      Vec::Zero(2), 3.0);
    s.name = "halfplane";
    s.exact_project_multi = [](const Vec& x) {
        return std::vector<Vec>{vec2(x(0), std::min(x(1), 0.0))};
    };
    s.exact_normal_rays = [](const Vec& x) {
        if (x(1) < -1e-9) return std::vector<Vec>{};
        return std::vector<Vec>{vec2(0, 1)};
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t seed) {
        std::vector<Vec> out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(-1.0, 1.0);
        while (static_cast<int>(out.size()) < count) {
            Vec p = vec2(x(0) + r * u01(rng), std::min(x(1) + r * u01(rng), 0.0));
            if ((p - x).norm() <= r) out.push_back(p);
            if (out.size() > 100000u) break;
        }
        return out;
    };
    return s;
}

SetOracle make_parabola_epigraph() {
    ScalarExpr e = parse_expr("x1^2 - x2");
    SmoothMap F = SmoothMap::from_exprs({e}, 2);
    F.jac = [](const Vec& x) {
        Mat J(1, 2);
        J << 2 * x(0), -1;
        return J;
    };
    SetOracle s = SetOracle::preimage(F, ConvexBody::nonpositive_halfline(), Vec::Zero(2), 4.0);
    s.name = "parabola-epigraph";
    s.exact_project_multi = [](const Vec& x) {
        if (x(1) >= x(0) * x(0) - 1e-15) return std::vector<Vec>{x};
        auto g = [&](double t) { return (vec2(t, t * t) - x).squaredNorm(); };
        std::vector<std::pair<double, Vec>> cands;
        for (double t : minimize_1d_multistart(g, -2.0, 2.0, 1025, 1e-14)) {
            Vec p = vec2(t, t * t);
            cands.emplace_back((p - x).norm(), p);
        }
        std::sort(cands.begin(), cands.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Vec> reps;
        for (const auto& [d, p] : cands) {
            if (d > cands.front().first * 1.05 + 1e-12) break;
            bool dup = false;
            for (const auto& rp : reps)
                if ((rp - p).norm() <= 1e-5) dup = true;
            if (!dup) reps.push_back(p);
        }
        return reps;
    };
    s.sampler = [](const Vec& x, double r, int count, std::uint64_t seed) {
        std::vector<Vec> out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(-1.0, 1.0);
        while (static_cast<int>(out.size()) < count) {
            const double u = x(0) + r * u01(rng);
            const double y = std::max(u * u, x(1) + r * u01(rng));
            Vec p = vec2(u, y);
            if ((p - x).norm() <= r) out.push_back(p);
            if (out.size() > 100000u) break;
        }
        return out;
    };
    return s;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"parabola-pair", "sawtooth-graph",  "sawtooth-epigraph",
            "power32-graph", "parabola-band",   "quartic-cross",
            "unit-circle",   "unit-ball",       "halfplane",
            "parabola-epigraph"};
}

SetOracle catalog(const std::string& name) {
    if (name == "parabola-pair") return make_parabola_pair();
    if (name == "sawtooth-graph") return make_sawtooth_graph();
    if (name == "sawtooth-epigraph") return make_sawtooth_epigraph();
    if (name == "power32-graph") return make_power32_graph();
    if (name == "parabola-band") return make_parabola_band();
    if (name == "quartic-cross") return make_quartic_cross();
    if (name == "unit-circle") return make_unit_circle();
    if (name == "unit-ball") return make_unit_ball();
    if (name == "halfplane") return make_halfplane();
    if (name == "parabola-epigraph") return make_parabola_epigraph();
    if (name.rfind("graph:", 0) == 0 || name.rfind("epigraph:", 0) == 0) {
        const bool epi = name[0] == 'e';
        const ScalarExpr e = parse_expr(name.substr(name.find(':') + 1));
        if (e.arity() > 1) throw std::invalid_argument("catalog: graph expr must use x1 only");
        Vec lo(1), hi(1);
        lo(0) = -2.0;
        hi(0) = 2.0;
        SetOracle s = epi ? SetOracle::epigraph_expr(e, lo, hi) : SetOracle::graph_expr(e, lo, hi);
        s.name = name;
        return s;
    }
    std::ostringstream os;
    os << "unknown catalog set '" << name << "'; available:";
    for (const auto& n : catalog_names()) os << " " << n;
    os << " graph:<expr> epigraph:<expr>";
    throw std::invalid_argument(os.str());
}

AmenableRep AmenableRep::make(SetOracle preimage_oracle, const Vec& base) {
    if (preimage_oracle.kind != OracleKind::Preimage)
        throw std::invalid_argument("AmenableRep: oracle must be a preimage variant");
    AmenableRep rep;
    rep.base = base;
    rep.base_jacobian = preimage_oracle.F.jacobian(base);
    rep.oracle = std::move(preimage_oracle);
    const Vec Fb = rep.oracle.F(base);
    if ((Fb - rep.oracle.D.project(Fb)).norm() > 1e-7)
        throw std::invalid_argument("AmenableRep: F(base) not in D");
    return rep;
}

std::vector<std::string> amenable_catalog() {
    return {"unit-ball", "halfplane", "parabola-epigraph", "power32-graph", "unit-circle"};
}

AmenableRep amenable_rep(const std::string& name, const Vec& base) {
    if (name == "unit-ball" || name == "halfplane") {
        SetOracle s = catalog(name);
        SetOracle rep_oracle = SetOracle::preimage(s.F, s.D, base, 3.0);
        rep_oracle.name = name;
        return AmenableRep::make(std::move(rep_oracle), base);
    }
    if (name == "parabola-epigraph") {
        SetOracle s = catalog(name);
        SetOracle rep_oracle = SetOracle::preimage(s.F, s.D, base, 2.0);
        rep_oracle.name = name;
        return AmenableRep::make(std::move(rep_oracle), base);
    }
    if (name == "power32-graph") {
        ScalarExpr e = parse_expr("abs(x1)^(3/2) - x2");
        SmoothMap F = SmoothMap::from_exprs({e}, 2);
        F.jac = [](const Vec& x) {
            Mat J(1, 2);
            const double g = 1.5 * std::sqrt(std::abs(x(0))) * (x(0) >= 0 ? 1.0 : -1.0);
            J << g, -1.0;
            return J;
        };
        SetOracle rep_oracle =
            SetOracle::preimage(F, ConvexBody::singleton(Vec::Zero(1)), base, 1.0);
        rep_oracle.name = name;
        return AmenableRep::make(std::move(rep_oracle), base);
    }
    if (name == "unit-circle") {
        ScalarExpr e = parse_expr("x1^2 + x2^2 - 1");
        SmoothMap F = SmoothMap::from_exprs({e}, 2);
        F.jac = [](const Vec& x) {
            Mat J(1, 2);
            J << 2 * x(0), 2 * x(1);
            return J;
        };
        SetOracle rep_oracle =
            SetOracle::preimage(F, ConvexBody::singleton(Vec::Zero(1)), base, 0.9);
        rep_oracle.name = name;
        return AmenableRep::make(std::move(rep_oracle), base);
    }
    throw std::invalid_argument("no amenable representation for '" + name + "'");
}

}  // namespace vgeo
