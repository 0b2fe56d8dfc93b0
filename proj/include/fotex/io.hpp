#pragma once

// JSON tensor files, CSV fiber and sweep files, and JSON reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fotex/errors.hpp"
#include "fotex/fot.hpp"
#include "fotex/realize.hpp"
#include "fotex/sdp.hpp"
#include "fotex/tensor.hpp"

namespace fotex {

using json = nlohmann::json;

inline constexpr const char* kFormatKm = "fot4-km-v1";
inline constexpr const char* kFormatCoeffs = "fot4-coeffs-v1";
inline constexpr const char* kFormatFot2 = "fot2-v1";

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string_view to_string(Frame f) { return f == Frame::Fixed ? "fixed" : "eigen"; }

inline Frame parse_frame(const json& j) {
  if (!j.is_string()) throw ParseError("field 'frame': expected \"fixed\" or \"eigen\"");
  const auto s = j.get<std::string>();
  if (s == "fixed") return Frame::Fixed;
  if (s == "eigen") return Frame::Eigen;
  throw ParseError("field 'frame': unknown frame '" + s + "'");
}

/// Parsed tensor file. The raw Kelvin-Mandel matrix is kept so that
/// complete-symmetry violations can be reported instead of rejected.
struct TensorFile {
  std::string format = kFormatKm;
  KM66 km;
  std::optional<Sym4> coefficients;  // as read, for the coefficient format

  Sym4 tensor(double tol = 1e-12) const { return coefficients ? *coefficients : sym4_from_km(km, tol); }
  Frame frame() const { return km.frame; }
};

namespace detail {

inline double number_field(const json& j, const std::string& name) {
  if (!j.is_number()) throw ParseError("field '" + name + "': expected a number");
  return j.get<double>();
}

}  // namespace detail

inline TensorFile parse_tensor_json(const json& j) {
  if (!j.is_object()) throw ParseError("tensor file: expected a JSON object");
  if (!j.contains("format") || !j["format"].is_string()) throw ParseError("field 'format': missing");
  TensorFile tf;
  tf.format = j["format"].get<std::string>();
  const Frame frame = j.contains("frame") ? parse_frame(j["frame"]) : Frame::Fixed;

  if (tf.format == kFormatKm) {
    if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].size() != 6)
      throw ParseError("field 'matrix': expected 6 rows");
    Mat6 m;
    for (int r = 0; r < 6; ++r) {
      const json& row = j["matrix"][r];
      if (!row.is_array() || row.size() != 6)
        throw ParseError("field 'matrix[" + std::to_string(r) + "]': expected 6 entries");
      for (int c = 0; c < 6; ++c)
        m(r, c) = detail::number_field(row[c], "matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw ParseError("field 'matrix': not symmetric (max |M - M^T| = " + fmt17(asym) + ")");
    tf.km = KM66{m, frame};
  } else if (tf.format == kFormatCoeffs) {
    if (!j.contains("coefficients") || !j["coefficients"].is_object())
      throw ParseError("field 'coefficients': missing");
    const json& cj = j["coefficients"];
    Sym4 a;
    for (int n = 0; n < 15; ++n) {
      const std::string name = Sym4::name_of(n);
      if (!cj.contains(name)) throw ParseError("field 'coefficients." + name + "': missing");
      a.c[n] = detail::number_field(cj[name], "coefficients." + name);
    }
    for (const auto& [key, v] : cj.items()) {
      bool ok = false;
      try {
        ok = Sym4::name_of(Sym4::slot_of(key)) == key;
      } catch (const Error&) {
      }
      if (!ok) throw ParseError("field 'coefficients." + key + "': not a sorted multi-index");
    }
    tf.km = km_from_sym4(a, frame);
    tf.coefficients = a;
  } else {
    throw ParseError("field 'format': unknown format '" + tf.format + "'");
  }
  return tf;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": malformed JSON (" + e.what() + ")");
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TensorFile read_tensor_file(const std::string& path) {
  return parse_tensor_json(parse_json_text(read_text(path), path));
}

inline json matrix_json(const Eigen::Ref<const MatX>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json tensor_json(const Sym4& a, Frame frame = Frame::Fixed, const std::string& format = kFormatKm) {
  json j;
  j["format"] = format;
  j["frame"] = std::string(to_string(frame));
  if (format == kFormatKm) {
    j["matrix"] = matrix_json(km_from_sym4(a).m);
  } else if (format == kFormatCoeffs) {
    json cj = json::object();
    for (int n = 0; n < 15; ++n) cj[Sym4::name_of(n)] = a.c[n];
    j["coefficients"] = cj;
  } else {
    throw ParseError("unknown tensor format '" + format + "'");
  }
  return j;
}

inline json tensor_json(const Sym2& a) {
  json j;
  j["format"] = kFormatFot2;
  j["matrix"] = matrix_json(a.matrix());
  return j;
}

inline Sym2 parse_fot2_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kFormatFot2) throw ParseError("field 'format': expected fot2-v1");
  if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].size() != 3)
    throw ParseError("field 'matrix': expected 3 rows");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!j["matrix"][r].is_array() || j["matrix"][r].size() != 3)
      throw ParseError("field 'matrix[" + std::to_string(r) + "]': expected 3 entries");
    for (int c = 0; c < 3; ++c) m(r, c) = detail::number_field(j["matrix"][r][c], "matrix");
  }
  return Sym2::from_matrix(m);
}

/// Shortest round-trip decimal output of the JSON library.
inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Fiber CSV: header "weight,p_x,p_y,p_z".

using WarningSink = std::function<void(const std::string&)>;

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number '" + s + "'");
  }
}

}  // namespace detail

/// Parses a fiber file. Negative weights throw InvalidMeasure; directions
/// and total weight are normalized, with a warning when the change exceeds
/// 1e-6.
inline FiberMeasure parse_fiber_csv(std::istream& in, const WarningSink& warn = {}) {
  std::string line;
  int lineno = 0;
  bool header = false;
  FiberMeasure m;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split_csv(line);
    if (!header) {
      if (cells != std::vector<std::string>{"weight", "p_x", "p_y", "p_z"})
        throw ParseError("line " + std::to_string(lineno) + ": expected header weight,p_x,p_y,p_z");
      header = true;
      continue;
    }
    const std::string where = "line " + std::to_string(lineno);
    if (cells.size() != 4) throw ParseError(where + ": expected 4 columns");
    const double w = detail::parse_double(cells[0], where + " weight");
    const Vec3 p(detail::parse_double(cells[1], where + " p_x"), detail::parse_double(cells[2], where + " p_y"),
                 detail::parse_double(cells[3], where + " p_z"));
    if (!(w >= 0.0)) throw InvalidMeasure(where + ": negative weight " + fmt17(w));
    const double n = p.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ParseError(where + ": zero or non-finite direction");
    if (std::abs(n - 1.0) > 1e-6 && warn) warn(where + ": direction renormalized (norm " + fmt17(n) + ")");
    m.atoms.push_back({w, Direction::normalized(p)});
  }
  if (!header) throw ParseError("fiber file: missing header weight,p_x,p_y,p_z");
  if (m.atoms.empty()) throw EmptyMeasure();
  const double total = m.total_weight();
  if (std::abs(total - 1.0) > 1e-12) {
    if (warn) warn("fiber weights sum to " + fmt17(total) + "; normalized to 1");
    m = m.normalized();
  }
  return m;
}

inline FiberMeasure read_fiber_file(const std::string& path, const WarningSink& warn = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_fiber_csv(in, warn);
}

inline void write_fiber_csv(std::ostream& out, const FiberMeasure& m) {
  out << "weight,p_x,p_y,p_z\n";
  for (const auto& a : m.atoms) {
    const Vec3& p = a.direction.vec();
    out << fmt17(a.weight) << ',' << fmt17(p(0)) << ',' << fmt17(p(1)) << ',' << fmt17(p(2)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweep CSV.

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "# lambda1=" << fmt17(r.lambda1) << "\n";
  out << "# lambda2=" << fmt17(r.lambda2) << "\n";
  out << "# lambda3=" << fmt17(1.0 - r.lambda1 - r.lambda2) << "\n";
  if (r.grid.planar)
    out << "# grid=planar n_phi=" << r.grid.n_phi << "\n";
  else
    out << "# grid=sphere n_phi=" << r.grid.n_phi << " n_theta=" << r.grid.n_theta << "\n";
  out << "# feasibility_tol=" << fmt17(r.options.feasibility_tol) << " gap_tol=" << fmt17(r.options.gap_tol)
      << " psd_tol=" << fmt17(r.options.psd_tol) << "\n";
  out << "# solver_iterations=" << r.total_iterations() << " failed_nodes=" << r.failures() << "\n";
  out << "phi_deg,theta_deg";
  for (SymmetryClass s : r.symmetries) out << ",value_" << to_string(s);
  out << "\n";
  for (const auto& n : r.nodes) {
    out << fmt17(n.phi_deg) << ',' << fmt17(n.theta_deg);
    for (double v : n.values) out << ',' << fmt17(v);
    out << '\n';
  }
}

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;
};

inline SweepTable parse_sweep_csv(std::istream& in) {
  SweepTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    const auto cells = detail::split_csv(line);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(c == "nan" ? std::numeric_limits<double>::quiet_NaN() : detail::parse_double(c, "sweep"));
    t.rows.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reports.

inline json vec_json(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json report_json(const CandidateReport& r) {
  return {{"is_candidate", r.is_candidate},
          {"eigenvalues", vec_json(r.km_eigenvalues)},
          {"min_eigenvalue", r.raw_min_eigenvalue},
          {"clamped", r.clamped},
          {"trace", r.trace},
          {"symmetry_residual", r.symmetry_residual}};
}

inline json report_json(const PropertyReport& r) {
  return {{"symmetry", r.symmetry},
          {"positivity", r.positivity},
          {"contraction", r.contraction},
          {"normalization", r.normalization}};
}

inline json report_json(const SdpSolution& s) {
  return {{"status", std::string(to_string(s.status))},
          {"iterations", s.iterations},
          {"primal_objective", s.objective_value},
          {"dual_objective", s.dual_value},
          {"primal_residual", s.residuals.primal},
          {"dual_residual", s.residuals.dual},
          {"gap", s.residuals.gap},
          {"complementarity", s.residuals.complementarity}};
}

inline json report_json(const RealizationResult& r) {
  json atoms = json::array();
  for (const auto& a : r.measure.atoms)
    atoms.push_back({{"weight", a.weight}, {"direction", {a.direction[0], a.direction[1], a.direction[2]}}});
  return {{"residual", r.residual},
          {"atom_count", r.atom_count},
          {"tolerance_reached", r.tolerance_reached},
          {"atoms", atoms}};
}

inline json report_json(const SosResult& r) {
  json j{{"feasible", r.feasible}, {"margin", r.margin}, {"solver", report_json(r.solution)}};
  if (r.certificate) {
    json sq = json::array();
    for (const auto& s : r.certificate->squares) sq.push_back(matrix_json(s.matrix()));
    j["squares"] = sq;
    j["gram"] = matrix_json(r.certificate->gram);
    j["reconstruction_residual"] = r.certificate->reconstruction_residual;
    j["min_gram_eigenvalue"] = r.certificate->min_gram_eigenvalue;
  }
  if (r.witness) {
    j["witness"] = tensor_json(r.witness->tensor);
    j["witness_value"] = r.witness->value;
  }
  return j;
}

}  // namespace fotex
