#include "vgeo/catalog.hpp"
#include "vgeo/cones.hpp"
#include "vgeo/geodesics.hpp"
#include "vgeo/optimality.hpp"
#include "vgeo/paths.hpp"
#include "vgeo/regularity.hpp"
#include "vgeo/report_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace vgeo;

namespace {

Vec parse_point(const std::string& s) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    Vec v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

std::vector<double> parse_ladder(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

SetOracle resolve_set(const std::string& catalog_name, const std::string& spec_path) {
    if (!catalog_name.empty()) return catalog(catalog_name);
    if (!spec_path.empty()) return load_set_spec(spec_path);
    throw std::runtime_error("one of --catalog or --spec is required");
}

std::optional<AmenableRep> try_rep(const SetOracle& C, const Vec& base) {
    try {
        return amenable_rep(C.name, base);
    } catch (const std::exception&) {
    }
    if (C.kind == OracleKind::Preimage) {
        try {
            return AmenableRep::make(C, base);
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

int cmd_check(const std::string& catalog_name, const std::string& spec_path,
              const std::string& point_s, std::string props, std::string eps_s,
              std::string radius_s, int samples, std::uint64_t seed, const std::string& out,
              const std::string& format, const std::string& objective) {
    SetOracle C = resolve_set(catalog_name, spec_path);
    const Vec base = parse_point(point_s);

    std::vector<std::string> properties;
    if (props == "all")
        properties = {"super-regularity", "uag", "intrinsic-approx-convexity", "prox-regularity",
                      "clarke-regularity", "eps-path-violation"};
    else {
        std::stringstream ss(props);
        std::string cell;
        while (std::getline(ss, cell, ',')) properties.push_back(cell);
    }
    const std::vector<double> epss =
        eps_s.empty() ? std::vector<double>{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}
                      : parse_ladder(eps_s);
    const std::vector<double> radii =
        radius_s.empty() ? std::vector<double>{0.25, 0.125, 0.0625, 0.03125, 0.015625,
                                               0.0078125, 0.00390625, 0.001953125}
                         : parse_ladder(radius_s);

    CheckOptions opts;
    opts.samples = samples;
    opts.seed = seed;
    opts.proj.seed = seed;

    std::vector<RegularityVerdict> rows;
    bool any_violation = false;
    for (const auto& prop : properties) {
        if (prop == "clarke-regularity") {
            RegularityVerdict v = clarke_verdict_catalog(C.name, base);
            any_violation |= v.violated();
            rows.push_back(std::move(v));
            continue;
        }
        for (double ee : epss) {
            for (double r : radii) {
                RegularityVerdict v;
                if (prop == "super-regularity")
                    v = check_super_regularity(C, base, ee, r, opts);
                else if (prop == "uag")
                    v = check_uag(C, base, ee, r, opts);
                else if (prop == "intrinsic-approx-convexity")
                    v = check_intrinsic_approx_convexity(C, base, ee, r, opts);
                else if (prop == "prox-regularity")
                    v = probe_prox_regularity(C, base, r, 16, opts);
                else if (prop == "function-approx-convexity")
                    v = check_function_approx_convexity(parse_expr(objective), base, ee, r, opts);
                else if (prop == "eps-path-violation") {
                    std::vector<std::pair<Vec, Vec>> pairs;
                    for (const Vec& m : C.sample_near(base, r, 6, seed))
                        if ((m - base).norm() > 1e-12) pairs.emplace_back(base, m);
                    v = search_eps_path_violation(C, base, ee, pairs, opts);
                } else {
                    throw std::runtime_error("unknown property '" + prop + "'");
                }
                any_violation |= v.violated();
                rows.push_back(std::move(v));
                if (prop == "prox-regularity") break;  // eps plays no role
            }
            if (prop == "prox-regularity") break;
        }
    }

    std::ostringstream body;
    if (format == "json") {
        body << "[\n";
        for (size_t i = 0; i < rows.size(); ++i)
            body << "  \"" << verdict_csv_row(rows[i]) << "\""
                 << (i + 1 < rows.size() ? ",\n" : "\n");
        body << "]\n";
    } else {
        body << kVerdictCsvHeader << "\n";
        for (const auto& v : rows) body << verdict_csv_row(v) << "\n";
    }
    if (out.empty() || out == "-") {
        std::cout << body.str();
    } else {
        std::ofstream of(out);
        of << body.str();
        std::cout << "wrote " << rows.size() << " verdict rows to " << out << "\n";
    }
    return any_violation ? 2 : 0;
}

int cmd_path(const std::string& catalog_name, const std::string& spec_path,
             const std::string& from_s, const std::string& to_s, double eps,
             const std::string& base_s, const std::string& out_prefix) {
    SetOracle C = resolve_set(catalog_name, spec_path);
    const Vec from = parse_point(from_s), to = parse_point(to_s);
    const Vec base = base_s.empty() ? from : parse_point(base_s);
    auto rep = try_rep(C, base);
    if (!rep) throw std::runtime_error("no amenable representation available for this set");
    auto [curve, report] = build_eps_path(*rep, from, to, eps);
    {
        std::ofstream cf(out_prefix + ".csv");
        write_curve_csv(cf, curve);
        std::ofstream jf(out_prefix + ".json");
        jf << eps_report_json(report) << "\n";
    }
    std::cout << eps_report_json(report) << "\n";
    return report.passed ? 0 : 2;
}

int cmd_geodesic(const std::string& catalog_name, const std::string& spec_path,
                 const std::string& from_s, const std::string& to_s, int levels,
                 const std::string& out_prefix) {
    SetOracle C = resolve_set(catalog_name, spec_path);
    const Vec from = parse_point(from_s), to = parse_point(to_s);
    AveragingOptions opts;
    opts.levels = levels;
    auto [curve, trace] = averaging_map(C, from, to, opts);
    const double len = curve_length(curve);
    std::ostringstream rep;
    rep << "{\n  \"length\": " << format_float(len)
        << ",\n  \"chord\": " << format_float((from - to).norm())
        << ",\n  \"trace\": " << trace_json(trace) << "\n}\n";
    {
        std::ofstream cf(out_prefix + ".csv");
        write_curve_csv(cf, curve);
        std::ofstream jf(out_prefix + ".json");
        jf << rep.str();
    }
    std::cout << rep.str();
    return 0;
}

int cmd_descend(const std::string& catalog_name, const std::string& spec_path,
                const std::string& point_s, const std::string& objective,
                const std::string& out_prefix) {
    SetOracle C = resolve_set(catalog_name, spec_path);
    const Vec x = parse_point(point_s);
    const ScalarExpr f = parse_expr(objective);
    auto rep = try_rep(C, x);
    FirstOrderOptions opts;
    DescentReport d = descent_path(f, C, x, opts, rep ? &*rep : nullptr);
    {
        std::ofstream cf(out_prefix + ".csv");
        cf << "t";
        for (int i = 1; i <= d.curve.dim(); ++i) cf << ",x" << i;
        cf << ",f\n";
        for (int i = 0; i < d.curve.size(); ++i) {
            cf << format_float(d.curve.grid(i));
            for (int j = 0; j < d.curve.dim(); ++j)
                cf << "," << format_float(d.curve.points[i](j));
            cf << "," << format_float(d.objective_values[i]) << "\n";
        }
        std::ofstream jf(out_prefix + ".json");
        jf << descent_json(d) << "\n";
    }
    std::cout << descent_json(d) << "\n";
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out) {
    if (!fs::is_directory(in_dir)) {
        std::cerr << "error: input directory '" << in_dir << "' not found\n";
        return 1;
    }
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(in_dir))
        if (e.path().extension() == ".csv") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());

    std::map<std::string, std::string> rows;   // dedup by (set, property, eps, radius, seed)
    for (const auto& f : files) {
        std::ifstream in(f);
        std::string line;
        if (!std::getline(in, line) || line.rfind("property,", 0) != 0) continue;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() < 16) continue;
            const std::string key =
                cells[1] + "|" + cells[0] + "|" + cells[3] + "|" + cells[4] + "|" + cells[14];
            rows.emplace(key, line);
        }
    }
    if (rows.empty()) {
        std::cerr << "error: no verdict rows found in '" << in_dir << "'\n";
        return 1;
    }
    std::ofstream of(out);
    of << kVerdictCsvHeader << "\n";
    for (const auto& [k, line] : rows) of << line << "\n";

    std::map<std::string, std::map<std::string, bool>> pivot;
    for (const auto& [k, line] : rows) {
        const auto cells = split_csv_line(line);
        pivot[cells[1]][cells[0]] = pivot[cells[1]][cells[0]] || (cells[5] == "violated");
    }
    for (const auto& [set, propmap] : pivot) {
        std::cout << set << ":";
        for (const auto& [p, viol] : propmap)
            std::cout << " " << p << "=" << (viol ? "violated" : "ok");
        std::cout << "\n";
    }
    std::cout << "merged " << rows.size() << " rows into " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational-geometry toolkit: eps-paths, geodesics, regularity checks"};
    app.require_subcommand(1);

    std::string catalog_name, spec_path, point_s, props = "all", eps_s, radius_s;
    std::string out, format = "csv", objective = "x1", from_s, to_s, base_s;
    std::string out_prefix = "vgeo_out", in_dir;
    int samples = 200, levels = 14;
    std::uint64_t seed = 42;
    double eps = 0.1;

    auto* check = app.add_subcommand("check", "run regularity checkers, one CSV row per cell");
    check->add_option("--catalog", catalog_name, "catalog set name");
    check->add_option("--spec", spec_path, "JSON set spec path");
    check->add_option("--point", point_s, "base point, comma separated")->required();
    check->add_option("--property", props, "property name list or 'all'");
    check->add_option("--eps", eps_s, "epsilon ladder, comma separated");
    check->add_option("--radius", radius_s, "radius ladder, comma separated");
    check->add_option("--samples", samples, "sample count per cell");
    check->add_option("--seed", seed, "RNG seed");
    check->add_option("--out", out, "output CSV path (default stdout)");
    check->add_option("--format", format, "csv or json");
    check->add_option("--objective", objective, "objective for function-approx-convexity");

    auto* path = app.add_subcommand("path", "build and verify an eps-path");
    path->add_option("--catalog", catalog_name, "catalog set name");
    path->add_option("--spec", spec_path, "JSON set spec path");
    path->add_option("--from", from_s)->required();
    path->add_option("--to", to_s)->required();
    path->add_option("--eps", eps)->required();
    path->add_option("--base", base_s, "representation base point (default --from)");
    path->add_option("--out", out_prefix, "output prefix for .csv/.json");

    auto* geo = app.add_subcommand("geodesic", "midpoint-projection averaging map");
    geo->add_option("--catalog", catalog_name, "catalog set name");
    geo->add_option("--spec", spec_path, "JSON set spec path");
    geo->add_option("--from", from_s)->required();
    geo->add_option("--to", to_s)->required();
    geo->add_option("--levels", levels, "refinement depth");
    geo->add_option("--out", out_prefix, "output prefix for .csv/.json");

    auto* desc = app.add_subcommand("descend", "feasible descent path from a non-stationary point");
    desc->add_option("--catalog", catalog_name, "catalog set name");
    desc->add_option("--spec", spec_path, "JSON set spec path");
    desc->add_option("--point", point_s)->required();
    desc->add_option("--objective", objective, "objective expression")->required();
    desc->add_option("--out", out_prefix, "output prefix for .csv/.json");

    auto* rep = app.add_subcommand("report", "merge verdict CSVs into a deduplicated matrix");
    rep->add_option("--in", in_dir, "directory of verdict CSVs")->required();
    rep->add_option("--out", out, "merged CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return cmd_check(catalog_name, spec_path, point_s, props, eps_s, radius_s, samples,
                             seed, out, format, objective);
        if (path->parsed())
            return cmd_path(catalog_name, spec_path, from_s, to_s, eps, base_s, out_prefix);
        if (geo->parsed())
            return cmd_geodesic(catalog_name, spec_path, from_s, to_s, levels, out_prefix);
        if (desc->parsed())
            return cmd_descend(catalog_name, spec_path, point_s, objective, out_prefix);
        if (rep->parsed()) return cmd_report(in_dir, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
