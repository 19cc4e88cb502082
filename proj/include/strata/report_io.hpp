#ifndef STRATA_REPORT_IO_HPP
#define STRATA_REPORT_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strata/constants.hpp"
#include "strata/errors.hpp"
#include "strata/heat.hpp"
#include "strata/inequalities.hpp"

namespace strata {

/// Writes through a sibling temporary and renames it into place, so readers
/// never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    body(out);
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV cells are never quoted here; commas become semicolons.
inline std::string csv_cell(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

// ---- verification reports ------------------------------------------------------

struct CaseReport {
  std::string case_name;
  std::size_t member = 0;
  std::uint64_t seed = 0;
  VerificationReport report;
};

inline nlohmann::ordered_json to_json(const CaseReport& c) {
  using oj = nlohmann::ordered_json;
  const auto& r = c.report;
  auto num = [](double v) { return std::isfinite(v) ? oj(v) : oj(fmt_double(v)); };
  oj j;
  j["case"] = c.case_name;
  j["member"] = c.member;
  j["seed"] = c.seed;
  j["tag"] = r.tag;
  j["group"] = r.group;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["slack"] = num(r.slack);
  j["tolerance"] = num(r.tolerance);
  j["verdict"] = to_string(r.verdict);
  if (r.constant) {
    j["constant"] = {{"name", r.constant_name},
                     {"value", num(r.constant->value)},
                     {"direction", to_string(r.constant->direction)},
                     {"provenance", r.constant->provenance},
                     {"converged", r.constant->converged}};
  } else {
    j["constant"] = nullptr;
  }
  j["normalization"] = num(r.normalization);
  j["boundary_decay"] = r.boundary_decay ? num(*r.boundary_decay) : oj(nullptr);
  j["grid"] = r.grid;
  j["measure"] = r.measure;
  oj d = oj::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = num(v);
  j["diagnostics"] = d;
  return j;
}

inline void write_reports_json(std::ostream& os, const std::vector<CaseReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  os << arr.dump(2) << "\n";
}

inline std::string case_label(const CaseReport& c) { return c.case_name + "#" + std::to_string(c.member); }

inline void write_summary_csv(std::ostream& os, const std::vector<CaseReport>& reports) {
  os << "case,lhs,rhs,slack,verdict\n";
  for (const auto& c : reports)
    os << csv_cell(case_label(c)) << ',' << fmt_double(c.report.lhs) << ',' << fmt_double(c.report.rhs) << ','
       << fmt_double(c.report.slack) << ',' << to_string(c.report.verdict) << '\n';
}

// ---- constant tables -----------------------------------------------------------

struct ConstantRecord {
  std::string name, group;
  double p = 2.0, a = 1.0;
  std::optional<double> q;
  ConstantEstimate estimate;
  bool flagged = false;  // optimizer stalled
};

inline void write_constants_csv(std::ostream& os, const std::vector<ConstantRecord>& rows) {
  os << "name,group,p,q,a,value,direction,provenance,flag\n";
  for (const auto& r : rows)
    os << csv_cell(r.name) << ',' << csv_cell(r.group) << ',' << fmt_double(r.p) << ','
       << (r.q ? fmt_double(*r.q) : std::string()) << ',' << fmt_double(r.a) << ',' << fmt_double(r.estimate.value)
       << ',' << to_string(r.estimate.direction) << ',' << csv_cell(r.estimate.provenance) << ','
       << (r.flagged ? "stalled" : "ok") << '\n';
}

inline BoundDirection parse_direction(const std::string& s) {
  if (s == to_string(BoundDirection::Exact)) return BoundDirection::Exact;
  if (s == to_string(BoundDirection::LowerBound)) return BoundDirection::LowerBound;
  if (s == to_string(BoundDirection::UpperBoundOnD0)) return BoundDirection::UpperBoundOnD0;
  throw InputError("unknown bound direction '" + s + "'");
}

inline std::vector<ConstantRecord> read_constants_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read constant table '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("name,group,p,q,a,value,direction,provenance", 0) != 0)
    throw InputError("'" + path + "' is not a constant table");
  std::vector<ConstantRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() < 8) throw InputError(path + ":" + std::to_string(lineno) + ": too few columns");
    try {
      ConstantRecord r;
      r.name = cells[0];
      r.group = cells[1];
      r.p = std::stod(cells[2]);
      if (!cells[3].empty()) r.q = std::stod(cells[3]);
      r.a = std::stod(cells[4]);
      r.estimate = ConstantEstimate::checked(std::stod(cells[5]), parse_direction(cells[6]), cells[7]);
      r.flagged = cells.size() > 8 && cells[8] == "stalled";
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument&) {
      throw InputError(path + ":" + std::to_string(lineno) + ": malformed row");
    } catch (const InternalConsistencyError&) {
      throw InputError(path + ":" + std::to_string(lineno) + ": constant must be positive and finite");
    }
  }
  return rows;
}

/// First row with the given name and group.
inline ConstantEstimate lookup_constant(const std::vector<ConstantRecord>& rows, const std::string& name,
                                        const std::string& group) {
  for (const auto& r : rows)
    if (r.name == name && r.group == group) return r.estimate;
  throw InputError("constant '" + name + "' for " + group + " not found in table");
}

// ---- heat outputs ----------------------------------------------------------------

struct HeatRecord {
  std::string name;
  HeatTrajectory trajectory;
  std::optional<double> exact_error;  // max relative L^2 error against a closed form
  bool bound_holds = true;
};

inline void write_heat_summary(std::ostream& os, const std::vector<HeatRecord>& runs) {
  os << "run,verdict,bound_holds,worst_bound_ratio,max_mass_drift,min_value,max_boundary_ratio,steps,dt,leak,"
        "exact_error\n";
  for (const auto& r : runs) {
    const auto& t = r.trajectory;
    std::string verdict = !r.bound_holds ? "violated" : (t.leak ? "warning-leak" : "holds");
    os << csv_cell(r.name) << ',' << verdict << ',' << (r.bound_holds ? 1 : 0) << ','
       << fmt_double(t.bound.empty() ? std::nan("") : t.worst_bound_ratio()) << ',' << fmt_double(t.max_mass_drift)
       << ',' << fmt_double(t.min_value) << ',' << fmt_double(t.max_boundary_ratio) << ',' << t.steps << ','
       << fmt_double(t.dt) << ',' << (t.leak ? 1 : 0) << ','
       << (r.exact_error ? fmt_double(*r.exact_error) : std::string()) << '\n';
  }
}

}  // namespace strata

#endif  // STRATA_REPORT_IO_HPP
