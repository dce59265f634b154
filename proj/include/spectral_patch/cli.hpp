#pragma once

// JSON/CSV front end for the spectral-patch tool. Commands take parsed JSON
// documents and produce a RunReport (or CSV text), so they can be exercised
// without spawning the binary.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectral_patch/error.hpp"
#include "spectral_patch/modspace.hpp"
#include "spectral_patch/numfield.hpp"
#include "spectral_patch/polymat.hpp"
#include "spectral_patch/spectral.hpp"

namespace spectral_patch::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitMalformedInput = 2,
  kExitNumericFailure = 3,
  kExitDegenerateInput = 4,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::AmbiguousMatching:
    case ErrorCode::AtBranchPoint:
      return kExitNumericFailure;
    case ErrorCode::NonReducedCurve:
    case ErrorCode::NoBranchPoints:
      return kExitDegenerateInput;
    default:
      return kExitMalformedInput;
  }
}

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(Complex c) { return json::array({c.real() + 0.0, c.imag() + 0.0}); }

inline json to_json(const Poly& p) {
  json out = json::array();
  for (auto c : p.coeffs()) out.push_back(to_json(c));
  return out;
}

inline json to_json(const ConstMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rank(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.rank(); ++j) row.push_back(to_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const std::vector<Root>& roots, const char* key) {
  json out = json::array();
  for (const auto& r : roots) out.push_back({{key, to_json(r.value)}, {"multiplicity", r.multiplicity}});
  return out;
}

/// A PolyMatrix as a MatrixDocument.
inline json matrix_document(const PolyMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rank(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.rank(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rank", m.rank()}, {"entries", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Parsing

inline Complex parse_complex(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    malformed("coefficient must be a pair [re, im] of numbers");
  const Complex c{j[0].get<double>(), j[1].get<double>()};
  if (!is_finite(c)) malformed("coefficient is not finite");
  return c;
}

inline Poly parse_poly(const json& j, int max_degree) {
  if (!j.is_array()) malformed("polynomial must be a list of coefficient pairs");
  std::vector<Complex> coeffs;
  for (const auto& c : j) coeffs.push_back(parse_complex(c));
  Poly p(std::move(coeffs));
  if (p.degree() > max_degree) malformed("polynomial degree exceeds " + std::to_string(max_degree));
  return p;
}

struct MatrixDocument {
  PolyMatrix matrix;
  NumericConfig config;
};

inline NumericConfig parse_config(const json& j) {
  if (!j.is_object()) malformed("config must be an object");
  NumericConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "eq_tol" || key == "cluster_tol") {
      if (!value.is_number()) malformed(key + " must be a number");
      (key == "eq_tol" ? cfg.eq_tol : cfg.cluster_tol) = value.get<double>();
    } else if (key == "max_iter" || key == "loop_nodes") {
      if (!value.is_number_integer()) malformed(key + " must be an integer");
      const auto v = value.get<long long>();
      if (v < 1 || v > 1'000'000) malformed(key + " out of range");
      (key == "max_iter" ? cfg.max_iter : cfg.loop_nodes) = static_cast<int>(v);
    } else {
      malformed("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline MatrixDocument parse_matrix_document(const json& j) {
  if (!j.is_object()) malformed("matrix document must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "rank" && key != "entries" && key != "config") malformed("unknown key '" + key + "'");
  if (!j.contains("rank") || !j["rank"].is_number_integer()) malformed("'rank' must be an integer");
  if (!j.contains("entries") || !j["entries"].is_array()) malformed("'entries' must be a grid");
  const auto rank = j["rank"].get<long long>();
  if (rank < 1 || rank > static_cast<long long>(kMaxRank)) malformed("rank must lie in [1, 4]");
  const auto n = static_cast<std::size_t>(rank);
  const auto& rows = j["entries"];
  if (rows.size() != n) malformed("entries must have 'rank' rows");
  std::vector<Poly> entries;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != n) malformed("entries must be a square grid of size 'rank'");
    for (const auto& e : row) entries.push_back(parse_poly(e, kMaxEntryDegree));
  }
  MatrixDocument doc{PolyMatrix(n, std::move(entries)), {}};
  if (j.contains("config")) doc.config = parse_config(j["config"]);
  return doc;
}

/// A Hitchin-base point: a list of r coefficient polynomials c_0 .. c_{r-1}.
inline CharData parse_base(const json& j, std::optional<std::size_t> rank) {
  if (!j.is_array() || j.empty()) malformed("base must be a non-empty list of coefficient lists");
  if (j.size() > kMaxRank) malformed("base has more than 4 coefficient polynomials");
  if (rank && *rank != j.size())
    malformed("base supplies " + std::to_string(j.size()) + " coefficients but --rank is " + std::to_string(*rank));
  CharData h{j.size(), {}};
  for (const auto& c : j) h.coeffs.push_back(parse_poly(c, kMaxSectionDegree));
  return h;
}

// ---------------------------------------------------------------------------
// Reports

struct RunReport {
  std::string command;
  json payload = json::object();
  std::vector<std::string> diagnostics;
  int exit_code = kExitOk;

  bool ok() const { return exit_code == kExitOk; }

  json to_json() const {
    return {{"command", command},
            {"status", ok() ? "ok" : "error"},
            {"payload", payload},
            {"diagnostics", diagnostics}};
  }

  static RunReport failure(std::string command, int code, std::string message, std::string error_name) {
    RunReport r{std::move(command), {{"exit_code", code}, {"error", std::move(error_name)}}, {std::move(message)}, code};
    return r;
  }
};

/// Runs `body`, turning library errors into error reports.
template <typename Body>
RunReport guarded(const std::string& command, Body body) {
  try {
    RunReport r;
    r.command = command;
    body(r);
    return r;
  } catch (const Error& e) {
    return RunReport::failure(command, exit_code_for(e.code()), e.what(), std::string(to_string(e.code())));
  } catch (const json::exception& e) {
    return RunReport::failure(command, kExitMalformedInput, e.what(), "MalformedJson");
  }
}

inline RunReport cmd_classify(const json& input) {
  return guarded("classify", [&](RunReport& r) {
    const auto doc = parse_matrix_document(input);
    if (doc.matrix.rank() != 2) malformed("classify needs a rank-2 document");
    if (!is_constant(doc.matrix)) malformed("classify needs constant (degree-0) entries");
    const ConstMatrix a = mat_eval(doc.matrix, Complex{});
    const auto cls = classify_2x2(a, doc.config);
    const auto moduli = moduli_point(cls.eigen);
    r.payload = {{"kind", std::string(to_string(cls.kind))},
                 {"eigenvalues", to_json(cls.eigen.values, "value")},
                 {"stable", is_semisimple(a, doc.config)},
                 {"normal_form", to_json(normal_form(a, doc.config))},
                 {"moduli", {{"trace", to_json(moduli.trace)}, {"determinant", to_json(moduli.determinant)}}}};
  });
}

inline RunReport cmd_spectral(const json& input) {
  return guarded("spectral", [&](RunReport& r) {
    const auto doc = parse_matrix_document(input);
    const auto curve = build_curve(doc.matrix, doc.config);
    json base = json::array();
    for (const auto& c : curve.chi.coeffs) base.push_back(to_json(c));
    r.payload = {{"rank", curve.chi.rank},
                 {"hitchin_base", std::move(base)},
                 {"discriminant", to_json(curve.disc)},
                 {"branch_points", to_json(curve.branch_points, "z")}};
  });
}

inline RunReport cmd_monodromy(const json& input, long long bp_index) {
  return guarded("monodromy", [&](RunReport& r) {
    const auto doc = parse_matrix_document(input);
    if (bp_index < 0) malformed("--bp-index must be non-negative");
    const auto curve = build_curve(doc.matrix, doc.config);
    const auto mono = monodromy(curve, static_cast<std::size_t>(bp_index), doc.config);
    r.payload = {{"branch_point", to_json(mono.branch_point)},
                 {"perm", mono.perm},
                 {"loop", {{"center", to_json(mono.center)}, {"radius", mono.radius}, {"nodes", mono.nodes}}}};
  });
}

inline RunReport cmd_section(const json& input, std::optional<std::size_t> rank) {
  return guarded("section", [&](RunReport& r) {
    const CharData h = parse_base(input, rank);
    const PolyMatrix section = companion_from_base(h);
    r.payload = {{"matrix", matrix_document(section)},
                 {"max_coeff_error", max_coeff_diff(hitchin_map(section), h)}};
  });
}

inline constexpr double kRoundtripTolerance = 1e-6;

inline RunReport cmd_roundtrip(const json& input) {
  return guarded("roundtrip", [&](RunReport& r) {
    const auto doc = parse_matrix_document(input);
    const auto report = roundtrip_check(doc.matrix, doc.config);
    r.payload = {{"max_coeff_error", report.max_coeff_error},
                 {"pointwise_class_agreement", report.pointwise_class_agreement},
                 {"samples", report.sample_points.size()}};
    if (report.max_coeff_error > kRoundtripTolerance || !report.pointwise_class_agreement) {
      r.exit_code = kExitVerificationFailed;
      r.payload["exit_code"] = r.exit_code;
      r.diagnostics.push_back(report.pointwise_class_agreement
                                  ? "round trip failed: coefficient error above 1e-6"
                                  : "round trip failed: pointwise class agreement does not hold");
    }
  });
}

// ---------------------------------------------------------------------------
// Sampling

struct Region {
  double re_min = -2.0, re_max = 2.0;
  double im_min = -2.0, im_max = 2.0;
  int grid_n = 64;

  void validate() const {
    for (double v : {re_min, re_max, im_min, im_max})
      if (!std::isfinite(v)) malformed("region bounds must be finite");
    if (re_min > re_max || im_min > im_max) malformed("region minimum exceeds maximum");
    if (grid_n < 2 || grid_n > 512) malformed("--grid-n must lie in [2, 512]");
  }

  /// Row-major grid: rows by imaginary part, columns by real part. A
  /// degenerate axis (min == max) contributes a single coordinate.
  std::vector<Complex> points() const {
    auto axis = [&](double lo, double hi) {
      std::vector<double> v;
      if (lo == hi) return std::vector<double>{lo};
      for (int k = 0; k < grid_n; ++k) v.push_back(k + 1 == grid_n ? hi : lo + (hi - lo) * k / (grid_n - 1));
      return v;
    };
    std::vector<Complex> out;
    for (double im : axis(im_min, im_max))
      for (double re : axis(re_min, re_max)) out.emplace_back(re, im);
    return out;
  }
};

inline constexpr const char* kSampleHeader = "z_re,z_im,sheet,lambda_re,lambda_im";

struct SampleResult {
  int exit_code = kExitOk;
  std::string csv;
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline SampleResult cmd_sample(const json& input, const Region& region) {
  SampleResult out;
  try {
    region.validate();
    const auto doc = parse_matrix_document(input);
    const auto curve = build_curve(doc.matrix, doc.config);
    const auto points = region.points();
    const auto sheets = sample_sheets(curve, points, doc.config);
    out.csv = std::string(kSampleHeader) + "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!sheets[i]) {
        ++out.skipped;
        continue;
      }
      for (std::size_t s = 0; s < sheets[i]->size(); ++s) {
        const Complex l = (*sheets[i])[s];
        out.csv += format_number(points[i].real()) + "," + format_number(points[i].imag()) + "," + std::to_string(s) +
                   "," + format_number(l.real()) + "," + format_number(l.imag()) + "\n";
      }
    }
    out.diagnostics.push_back("skipped " + std::to_string(out.skipped) +
                              " grid point(s) within cluster_tol of a branch point");
  } catch (const Error& e) {
    out = SampleResult{exit_code_for(e.code()), "", 0, {e.what()}};
  } catch (const json::exception& e) {
    out = SampleResult{kExitMalformedInput, "", 0, {e.what()}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

struct Options {
  std::string command;
  long long bp_index = 0;
  std::optional<std::size_t> rank;
  Region region;
};

inline const std::set<std::string>& commands() {
  static const std::set<std::string> names{"classify", "spectral", "monodromy", "section", "sample", "roundtrip"};
  return names;
}

/// Runs one command on already-read input text. The report or CSV goes to
/// `out`, diagnostics to `err`. Returns the process exit code.
inline int run(const Options& opts, const std::string& text, std::ostream& out, std::ostream& err) {
  json input;
  try {
    input = json::parse(text);
  } catch (const json::parse_error& e) {
    err << "error: malformed JSON input: " << e.what() << '\n';
    if (opts.command != "sample") {
      auto r = RunReport::failure(opts.command, kExitMalformedInput, std::string("malformed JSON: ") + e.what(),
                                  "MalformedJson");
      out << r.to_json().dump(2) << '\n';
    }
    return kExitMalformedInput;
  }

  if (opts.command == "sample") {
    const auto result = cmd_sample(input, opts.region);
    out << result.csv;
    for (const auto& d : result.diagnostics) err << d << '\n';
    return result.exit_code;
  }

  RunReport report;
  if (opts.command == "classify")
    report = cmd_classify(input);
  else if (opts.command == "spectral")
    report = cmd_spectral(input);
  else if (opts.command == "monodromy")
    report = cmd_monodromy(input, opts.bp_index);
  else if (opts.command == "section")
    report = cmd_section(input, opts.rank);
  else if (opts.command == "roundtrip")
    report = cmd_roundtrip(input);
  else
    report = RunReport::failure(opts.command, kExitMalformedInput, "unknown command '" + opts.command + "'",
                                "UnknownCommand");

  out << report.to_json().dump(2) << '\n';
  for (const auto& d : report.diagnostics) err << "error: " << d << '\n';
  return report.exit_code;
}

}  // namespace spectral_patch::cli
