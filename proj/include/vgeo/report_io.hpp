#pragma once

#include "vgeo/geodesics.hpp"
#include "vgeo/geometry.hpp"
#include "vgeo/optimality.hpp"
#include "vgeo/paths.hpp"
#include "vgeo/regularity.hpp"
#include "vgeo/set_oracle.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vgeo {

// floats printed with 17 significant digits so re-verification is exact
std::string format_float(double v);

void write_curve_csv(std::ostream& os, const SampledCurve& c);
SampledCurve read_curve_csv(std::istream& is);

extern const char* kVerdictCsvHeader;
std::string verdict_csv_row(const RegularityVerdict& v);
std::vector<std::string> split_csv_line(const std::string& line);

std::string eps_report_json(const EpsPathReport& r);
std::string trace_json(const RefinementTrace& t);
std::string sigma_json(const SigmaFit& s);
std::string descent_json(const DescentReport& d);
std::string cq_json(const CQCertificate& c);

// JSON set specification:
// {"kind": "preimage"|"graph"|"epigraph"|"curve-union"|"catalog", "dim": n,
//  "F": ["expr", ...], "D": {...}, "f": "expr", "name": "...",
//  "center": [...], "radius": r}
SetOracle parse_set_spec(const std::string& json_text);
SetOracle load_set_spec(const std::string& path);
std::string set_spec_json(const SetOracle& s);   // round-trip for serializable oracles

ConvexBody parse_body_json(const std::string& json_text);
std::string body_json(const ConvexBody& b);

}  // namespace vgeo
