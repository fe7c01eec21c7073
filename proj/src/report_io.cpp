#include "vgeo/report_io.hpp"

#include "vgeo/catalog.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace vgeo {

using nlohmann::json;

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_curve_csv(std::ostream& os, const SampledCurve& c) {
    const int n = c.dim();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",dx" << i;
    os << "\n";
    for (int i = 0; i < c.size(); ++i) {
        os << format_float(c.grid(i));
        for (int j = 0; j < n; ++j) os << "," << format_float(c.points[i](j));
        for (int j = 0; j < n; ++j) os << "," << format_float(c.deriv[i](j));
        os << "\n";
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

SampledCurve read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("curve csv: empty");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "t")
        throw std::runtime_error("curve csv: bad header");
    const int n = static_cast<int>((header.size() - 1) / 2);
    SampledCurve c;
    std::vector<double> ts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != 1 + 2 * n)
            throw std::runtime_error("curve csv: bad row width");
        ts.push_back(std::stod(cells[0]));
        Vec p(n), d(n);
        for (int j = 0; j < n; ++j) p(j) = std::stod(cells[1 + j]);
        for (int j = 0; j < n; ++j) d(j) = std::stod(cells[1 + n + j]);
        c.points.push_back(p);
        c.deriv.push_back(d);
    }
    c.grid = Eigen::Map<Eigen::VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    return c;
}

const char* kVerdictCsvHeader =
    "property,set,point,eps,radius,verdict,witness_x,witness_xp,witness_v,witness_t,lhs,rhs,"
    "margin_min,samples,seed,note";

namespace {
std::string vec_field(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ";";
        s += format_float(v(i));
    }
    return s;
}
std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == ',') out += ';';
        else out += c;
    }
    return out + "\"";
}
}  // namespace

std::string verdict_csv_row(const RegularityVerdict& v) {
    std::ostringstream os;
    os << v.property << "," << v.set_name << "," << vec_field(v.base) << ","
       << format_float(v.eps) << "," << format_float(v.radius) << ","
       << (v.violated() ? "violated" : "no-violation-found") << "," << vec_field(v.wx) << ","
       << vec_field(v.wxp) << "," << vec_field(v.wv) << "," << format_float(v.wt) << ","
       << format_float(v.lhs) << "," << format_float(v.rhs) << "," << format_float(v.margin_min)
       << "," << v.samples << "," << v.seed << "," << quote(v.note);
    return os.str();
}

namespace {
json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}
Vec vec_from_json(const json& a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}
}  // namespace

std::string eps_report_json(const EpsPathReport& r) {
    json j{{"requested_eps", r.requested_eps},
           {"achieved", r.achieved},
           {"length", r.length},
           {"chord", r.chord},
           {"midline_linear", r.midline_linear},
           {"midline_quadratic", r.midline_quadratic},
           {"feasibility_residual_max", r.feasibility_residual_max},
           {"endpoint_error", r.endpoint_error},
           {"passed", r.passed},
           {"note", r.note}};
    return j.dump(2);
}

std::string trace_json(const RefinementTrace& t) {
    json j{{"lengths", t.lengths},
           {"displacements", t.displacements},
           {"node_counts", t.node_counts},
           {"converged", t.converged},
           {"levels_run", t.levels_run}};
    return j.dump(2);
}

std::string sigma_json(const SigmaFit& s) {
    json samples = json::array();
    for (const auto& [d, defect] : s.samples) samples.push_back({{"d", d}, {"defect", defect}});
    json j{{"r", s.r},
           {"sigma", s.sigma},
           {"pairs_used", s.pairs_used},
           {"max_violation", s.max_violation},
           {"margin", s.margin},
           {"cross_check_error", s.cross_check_error},
           {"samples", samples}};
    return j.dump(2);
}

std::string descent_json(const DescentReport& d) {
    json j{{"x", vec_json(d.x)},
           {"gradient", vec_json(d.gradient)},
           {"direction", vec_json(d.direction)},
           {"predicted_slope", d.predicted_slope},
           {"measured_slope", d.measured_slope},
           {"eps_used", d.eps_used},
           {"t_star", d.t_star},
           {"objective_values", d.objective_values},
           {"note", d.note}};
    return j.dump(2);
}

std::string cq_json(const CQCertificate& c) {
    json j{{"status", c.status == CQStatus::Holds ? "holds" : "fails"},
           {"lambda", c.lambda},
           {"delta", c.delta},
           {"dual_residual", c.dual_residual},
           {"reduced", c.reduced},
           {"note", c.note}};
    if (c.w.size()) j["w"] = vec_json(c.w);
    if (c.y.size()) j["y"] = vec_json(c.y);
    return j.dump(2);
}

ConvexBody parse_body_json(const std::string& text) {
    const json j = json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") return ConvexBody::ball(vec_from_json(j.at("center")), j.at("radius"));
    if (kind == "box") {
        Vec lo = vec_from_json(j.at("lo")), hi = vec_from_json(j.at("hi"));
        // nulls encoded as +-1e308 are accepted as infinities
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (lo(i) <= -1e300) lo(i) = -std::numeric_limits<double>::infinity();
            if (hi(i) >= 1e300) hi(i) = std::numeric_limits<double>::infinity();
        }
        return ConvexBody::box(lo, hi);
    }
    if (kind == "halfspaces") {
        const json& rows = j.at("A");
        Mat A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < rows[r].size(); ++c)
                A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    rows[r][c].get<double>();
        return ConvexBody::halfspaces(A, vec_from_json(j.at("b")));
    }
    if (kind == "orthant") return ConvexBody::orthant(j.at("dim"), j.value("sign", 1.0));
    if (kind == "singleton") return ConvexBody::singleton(vec_from_json(j.at("point")));
    if (kind == "affine") {
        const json& cols = j.at("basis");
        const Vec p = vec_from_json(j.at("point"));
        Mat B(p.size(), static_cast<Eigen::Index>(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = vec_from_json(cols[c]);
        return ConvexBody::affine(p, B);
    }
    if (kind == "product") {
        std::vector<ConvexBody> parts;
        for (const auto& p : j.at("parts")) parts.push_back(parse_body_json(p.dump()));
        return ConvexBody::product(std::move(parts));
    }
    throw std::invalid_argument("unknown convex body kind '" + kind + "'");
}

namespace {
json body_to_json(const ConvexBody& b) {
    switch (b.kind()) {
        case BodyKind::Ball:
            return {{"kind", "ball"}, {"center", vec_json(b.ball_center)}, {"radius", b.ball_radius}};
        case BodyKind::Box: {
            Vec lo = b.box_lo, hi = b.box_hi;
            for (Eigen::Index i = 0; i < lo.size(); ++i) {
                if (!std::isfinite(lo(i))) lo(i) = -1e308;
                if (!std::isfinite(hi(i))) hi(i) = 1e308;
            }
            return {{"kind", "box"}, {"lo", vec_json(lo)}, {"hi", vec_json(hi)}};
        }
        case BodyKind::Halfspaces: {
            json rows = json::array();
            for (Eigen::Index r = 0; r < b.hs_A.rows(); ++r)
                rows.push_back(vec_json(b.hs_A.row(r).transpose()));
            return {{"kind", "halfspaces"}, {"A", rows}, {"b", vec_json(b.hs_b)}};
        }
        case BodyKind::Singleton:
            return {{"kind", "singleton"}, {"point", vec_json(b.point)}};
        case BodyKind::Affine: {
            json cols = json::array();
            for (Eigen::Index c = 0; c < b.aff_basis.cols(); ++c)
                cols.push_back(vec_json(b.aff_basis.col(c)));
            return {{"kind", "affine"}, {"point", vec_json(b.aff_point)}, {"basis", cols}};
        }
        case BodyKind::Product: {
            json parts = json::array();
            for (const auto& p : b.parts) parts.push_back(body_to_json(p));
            return {{"kind", "product"}, {"parts", parts}};
        }
    }
    throw std::logic_error("body_to_json: bad kind");
}
}  // namespace

std::string body_json(const ConvexBody& b) { return body_to_json(b).dump(2); }

SetOracle parse_set_spec(const std::string& text) {
    const json j = json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "catalog") return catalog(j.at("name").get<std::string>());
    if (kind == "preimage") {
        const int n = j.at("dim").get<int>();
        std::vector<ScalarExpr> comps;
        for (const auto& e : j.at("F")) comps.push_back(parse_expr(e.get<std::string>()));
        SmoothMap F = SmoothMap::from_exprs(comps, n);
        ConvexBody D = parse_body_json(j.at("D").dump());
        Vec center = j.contains("center") ? vec_from_json(j.at("center")) : Vec(Vec::Zero(n));
        const double radius = j.value("radius", 2.0);
        SetOracle s = SetOracle::preimage(std::move(F), std::move(D), center, radius);
        s.name = j.value("name", std::string("preimage"));
        return s;
    }
    if (kind == "graph" || kind == "epigraph") {
        const ScalarExpr e = parse_expr(j.at("f").get<std::string>());
        const int dn = std::max(1, e.arity());
        Vec lo = Vec::Constant(dn, -2.0), hi = Vec::Constant(dn, 2.0);
        if (j.contains("center") && j.contains("radius")) {
            const Vec c = vec_from_json(j.at("center"));
            const double r = j.at("radius").get<double>();
            lo = Vec(c.head(dn).array() - r);
            hi = Vec(c.head(dn).array() + r);
        }
        SetOracle s = kind == "graph" ? SetOracle::graph_expr(e, lo, hi)
                                      : SetOracle::epigraph_expr(e, lo, hi);
        s.name = j.value("name", kind);
        return s;
    }
    if (kind == "curve-union") {
        std::vector<ParametricBranch> branches;
        int dim = j.at("dim").get<int>();
        for (const auto& br : j.at("branches")) {
            std::vector<ScalarExpr> comps;
            for (const auto& e : br.at("point")) comps.push_back(parse_expr(e.get<std::string>()));
            const double a = br.at("t")[0].get<double>(), b = br.at("t")[1].get<double>();
            branches.push_back(ParametricBranch{
                [comps](double t) {
                    Vec tt(1);
                    tt(0) = t;
                    Vec p(static_cast<Eigen::Index>(comps.size()));
                    for (size_t i = 0; i < comps.size(); ++i)
                        p(static_cast<Eigen::Index>(i)) = comps[i].eval(tt);
                    return p;
                },
                a, b});
        }
        SetOracle s = SetOracle::curve_union(std::move(branches), dim);
        s.name = j.value("name", std::string("curve-union"));
        return s;
    }
    throw std::invalid_argument("unknown set spec kind '" + kind + "'");
}

SetOracle load_set_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open set spec '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_set_spec(ss.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("set spec parse error at byte " + std::to_string(e.byte) + ": " +
                                 e.what());
    }
}

std::string set_spec_json(const SetOracle& s) {
    json j;
    switch (s.kind) {
        case OracleKind::Preimage: {
            if (s.F.exprs.empty())
                throw std::runtime_error(
                    "set_spec_json: preimage map has no expression form; use catalog kind");
            j["kind"] = "preimage";
            j["dim"] = s.dim;
            json F = json::array();
            for (const auto& e : s.F.exprs) F.push_back(e.print());
            j["F"] = F;
            j["D"] = json::parse(body_json(s.D));
            j["center"] = vec_json(s.center);
            j["radius"] = std::isfinite(s.radius) ? s.radius : 1e308;
            j["name"] = s.name;
            break;
        }
        case OracleKind::FunctionGraph:
        case OracleKind::FunctionEpigraph: {
            if (!s.f_expr.valid())
                throw std::runtime_error("set_spec_json: graph oracle has no expression form");
            j["kind"] = s.kind == OracleKind::FunctionGraph ? "graph" : "epigraph";
            j["f"] = s.f_expr.print();
            j["name"] = s.name;
            break;
        }
        default:
            throw std::runtime_error("set_spec_json: oracle not serializable; use catalog kind");
    }
    return j.dump(2);
}

}  // namespace vgeo
