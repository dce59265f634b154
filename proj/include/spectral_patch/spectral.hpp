#pragma once

// Spectral curves chi(l, z) = 0 of polynomial matrices: branch points,
// eigenvalue sheets and their continuation along paths, monodromy, the
// companion-matrix section of the Hitchin map and the pushforward matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spectral_patch/error.hpp"
#include "spectral_patch/modspace.hpp"
#include "spectral_patch/numfield.hpp"
#include "spectral_patch/polymat.hpp"

namespace spectral_patch {

struct SpectralCurve {
  CharData chi;
  Poly disc;                       // discriminant of chi in l, a polynomial in z
  std::vector<Root> branch_points; // roots of disc, canonical order
};

/// Eigenvalues above one base point, in canonical order.
struct SheetAssignment {
  Complex basepoint;
  std::vector<Complex> sheets;
};

/// perm[i] is the index of the sheet where sheet i ends up.
using Permutation = std::vector<std::size_t>;

struct ContinuationResult {
  SheetAssignment end;
  Permutation perm;
};

struct MonodromyPermutation {
  Complex branch_point;
  Permutation perm;
  Complex center;
  double radius = 0.0;
  int nodes = 0;
};

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  return p;
}

/// (a . b)[i] = a[b[i]]: apply b first, then a.
inline Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a.at(b[i]);
  return out;
}

/// Discriminant of chi in l, computed over the polynomial ring as the
/// signed Sylvester determinant of chi and d chi / d l. Rank 1 covers have
/// no collisions, so the discriminant is the constant 1.
inline Poly lambda_discriminant(const CharData& chi) {
  const std::size_t r = chi.rank;
  if (r == 1) return Poly::constant(1.0);
  std::vector<Poly> p(chi.coeffs);
  p.push_back(Poly::constant(1.0));
  std::vector<Poly> q;
  for (std::size_t i = 1; i <= r; ++i) q.push_back(p[i] * Complex{static_cast<double>(i)});
  const Poly res = cofactor_determinant(sylvester_matrix(p, q), 2 * r - 1);
  return (r * (r - 1) / 2) % 2 == 0 ? res : -res;
}

inline SpectralCurve build_curve(const PolyMatrix& m, const NumericConfig& cfg = {}) {
  SpectralCurve curve{hitchin_map(m), {}, {}};
  curve.disc = lambda_discriminant(curve.chi);
  if (curve.disc.is_zero())
    throw Error(ErrorCode::NonReducedCurve, "discriminant vanishes identically; the spectral curve is non-reduced");
  if (curve.disc.degree() >= 1) curve.branch_points = poly_roots(curve.disc, cfg);
  return curve;
}

namespace detail {

inline void require_away_from_branch_points(const SpectralCurve& curve, Complex z, const NumericConfig& cfg) {
  for (const auto& bp : curve.branch_points)
    if (std::abs(z - bp.value) <= cfg.cluster_tol)
      throw Error(ErrorCode::AtBranchPoint, "point lies within cluster_tol of a branch point");
}

/// Nearest-neighbour assignment of tracked values to candidates; nullopt
/// when some nearest candidate is not at least twice as close as the runner
/// up, or when two values claim the same candidate.
inline std::optional<Permutation> nearest_match(const std::vector<Complex>& tracked,
                                                const std::vector<Complex>& candidates) {
  Permutation match(tracked.size());
  std::vector<bool> taken(candidates.size(), false);
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    double best = std::numeric_limits<double>::infinity(), second = best;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const double d = std::abs(tracked[i] - candidates[j]);
      if (d < best) {
        second = best;
        best = d;
        best_j = j;
      } else if (d < second) {
        second = d;
      }
    }
    if (second < 2.0 * best || taken[best_j]) return std::nullopt;
    taken[best_j] = true;
    match[i] = best_j;
  }
  return match;
}

}  // namespace detail

/// The r roots of chi(., z), canonical order, pairwise separated by more
/// than cluster_tol.
inline std::vector<Complex> sheets_at(const SpectralCurve& curve, Complex z, const NumericConfig& cfg = {}) {
  detail::require_away_from_branch_points(curve, z, cfg);
  const auto roots = poly_roots(curve.chi.at(z), cfg);
  std::vector<Complex> out;
  for (const auto& r : roots) {
    if (r.multiplicity > 1) throw Error(ErrorCode::AtBranchPoint, "sheets collide above the point");
    out.push_back(r.value);
  }
  return out;
}

namespace detail {

inline constexpr int kMaxBisections = 3;

inline void advance_sheets(const SpectralCurve& curve, std::vector<Complex>& tracked, Complex from, Complex to,
                           int depth, const NumericConfig& cfg) {
  auto candidates = sheets_at(curve, to, cfg);
  if (auto match = nearest_match(tracked, candidates)) {
    for (std::size_t i = 0; i < tracked.size(); ++i) tracked[i] = candidates[(*match)[i]];
    return;
  }
  if (depth >= kMaxBisections)
    throw Error(ErrorCode::AmbiguousMatching, "sheet matching stayed ambiguous after refining the path");
  const Complex mid = (from + to) / 2.0;
  advance_sheets(curve, tracked, from, mid, depth + 1, cfg);
  advance_sheets(curve, tracked, mid, to, depth + 1, cfg);
}

}  // namespace detail

/// Follows every sheet along the path by nearest-neighbour matching between
/// consecutive nodes, bisecting ambiguous segments up to three times.
/// perm maps the index of a start sheet to the index of the end sheet it
/// continues to.
inline ContinuationResult continue_sheets(const SpectralCurve& curve, const std::vector<Complex>& path,
                                          const SheetAssignment& start, const NumericConfig& cfg = {}) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "continuation path is empty");
  if (std::abs(path.front() - start.basepoint) > cfg.eq_tol)
    throw Error(ErrorCode::InvalidArgument, "path does not start at the sheet basepoint");
  if (start.sheets.size() != curve.chi.rank)
    throw Error(ErrorCode::RankMismatch, "sheet count differs from the cover degree");
  for (auto z : path) detail::require_away_from_branch_points(curve, z, cfg);

  std::vector<Complex> tracked = start.sheets;
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    detail::advance_sheets(curve, tracked, path[k], path[k + 1], 0, cfg);

  ContinuationResult out{{path.back(), sheets_at(curve, path.back(), cfg)}, {}};
  auto perm = detail::nearest_match(tracked, out.end.sheets);
  if (!perm) throw Error(ErrorCode::AmbiguousMatching, "final sheets do not match the tracked values");
  out.perm = std::move(*perm);
  return out;
}

/// Monodromy around the counterclockwise circle |z - center| = radius
/// discretized with `nodes` nodes, starting at center + radius.
inline Permutation loop_monodromy(const SpectralCurve& curve, Complex center, double radius, int nodes,
                                  const NumericConfig& cfg = {}) {
  if (!(radius > 0.0) || nodes < 3) throw Error(ErrorCode::InvalidArgument, "loop needs radius > 0 and >= 3 nodes");
  std::vector<Complex> path;
  path.reserve(static_cast<std::size_t>(nodes) + 1);
  for (int k = 0; k < nodes; ++k)
    path.push_back(center + std::polar(radius, 2.0 * std::numbers::pi * k / nodes));
  path.push_back(path.front());
  const SheetAssignment start{path.front(), sheets_at(curve, path.front(), cfg)};
  return continue_sheets(curve, path, start, cfg).perm;
}

/// Sheet permutation around branch point `bp_index`: a circle of radius
/// min(1, half the distance to the nearest other branch point), with
/// cfg.loop_nodes nodes, retried once with four times as many.
inline MonodromyPermutation monodromy(const SpectralCurve& curve, std::size_t bp_index, const NumericConfig& cfg = {}) {
  if (curve.branch_points.empty()) throw Error(ErrorCode::NoBranchPoints, "the spectral curve has no branch points");
  if (bp_index >= curve.branch_points.size())
    throw Error(ErrorCode::InvalidArgument, "branch point index " + std::to_string(bp_index) + " out of range");
  const Complex center = curve.branch_points[bp_index].value;
  double radius = 1.0;
  for (std::size_t j = 0; j < curve.branch_points.size(); ++j)
    if (j != bp_index) radius = std::min(radius, std::abs(curve.branch_points[j].value - center) / 2.0);

  MonodromyPermutation out{center, {}, center, radius, cfg.loop_nodes};
  try {
    out.perm = loop_monodromy(curve, center, radius, out.nodes, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AmbiguousMatching) throw;
    out.nodes *= 4;
    out.perm = loop_monodromy(curve, center, radius, out.nodes, cfg);
  }
  return out;
}

/// Companion matrix of chi in l: ones on the subdiagonal, last column
/// -coeffs. Its characteristic data is exactly h, so this is a section of
/// the Hitchin map.
inline PolyMatrix companion_from_base(const CharData& h) {
  if (h.coeffs.size() != h.rank) throw Error(ErrorCode::InvalidArgument, "characteristic data has the wrong length");
  PolyMatrix m(h.rank);
  for (std::size_t i = 0; i + 1 < h.rank; ++i) m.set(i + 1, i, Poly::constant(1.0));
  for (std::size_t i = 0; i < h.rank; ++i) m.set(i, h.rank - 1, -h.coeffs[i]);
  return m;
}

/// diag(sheets) above z; within cluster_tol of a branch point (or wherever
/// the sheets collide) the companion matrix of chi(., z) instead.
inline ConstMatrix pushforward_matrix(const SpectralCurve& curve, Complex z, const NumericConfig& cfg = {}) {
  try {
    return ConstMatrix::diagonal(sheets_at(curve, z, cfg));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AtBranchPoint) throw;
  }
  return mat_eval(companion_from_base(curve.chi), z);
}

/// Pointwise class agreement of two constant matrices. Rank 2 uses the
/// normal-form test; other ranks are certified only when both spectra are
/// simple and equal, since then both matrices are diagonalizable.
inline bool pointwise_agree(const ConstMatrix& a, const ConstMatrix& b, const NumericConfig& cfg = {}) {
  if (a.rank() != b.rank()) return false;
  if (a.rank() == 2) return similar(a, b, cfg);
  const auto ea = eigenvalues(a, cfg), eb = eigenvalues(b, cfg);
  const auto simple = [](const EigenTuple& t) {
    return std::all_of(t.values.begin(), t.values.end(), [](const Root& r) { return r.multiplicity == 1; });
  };
  return simple(ea) && simple(eb) && same_eigen(ea, eb, cfg);
}

/// Deterministic spiral of base points kept well clear of every branch point.
inline std::vector<Complex> sample_points_away(const SpectralCurve& curve, std::size_t count,
                                               const NumericConfig& cfg = {}) {
  const double margin = 1e-3 + 10.0 * cfg.cluster_tol;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Complex> out;
  for (std::size_t k = 0; out.size() < count; ++k) {
    const Complex z = Complex{0.3, 0.1} + std::polar(0.45 * std::sqrt(k + 1.0), golden * static_cast<double>(k));
    const bool clear = std::all_of(curve.branch_points.begin(), curve.branch_points.end(),
                                   [&](const Root& bp) { return std::abs(z - bp.value) > margin; });
    if (clear) out.push_back(z);
  }
  return out;
}

struct RoundtripReport {
  double max_coeff_error = 0.0;
  bool pointwise_class_agreement = false;
  std::vector<Complex> sample_points;
};

inline constexpr std::size_t kRoundtripSamples = 20;

/// Base -> section -> base, plus pointwise agreement of the input with the
/// pushforward matrix at sample points away from the branch locus.
inline RoundtripReport roundtrip_check(const PolyMatrix& m, const NumericConfig& cfg = {}) {
  const SpectralCurve curve = build_curve(m, cfg);
  RoundtripReport report;
  report.max_coeff_error = max_coeff_diff(hitchin_map(companion_from_base(curve.chi)), curve.chi);
  report.sample_points = sample_points_away(curve, kRoundtripSamples, cfg);
  report.pointwise_class_agreement = std::all_of(
      report.sample_points.begin(), report.sample_points.end(),
      [&](Complex z) { return pointwise_agree(mat_eval(m, z), pushforward_matrix(curve, z, cfg), cfg); });
  return report;
}

/// Sheets above each point, or nullopt where the point is at (or the sheets
/// collide near) a branch point. Points are split across worker threads;
/// the result is in input order and identical to a sequential run.
inline std::vector<std::optional<std::vector<Complex>>> sample_sheets(const SpectralCurve& curve,
                                                                      const std::vector<Complex>& points,
                                                                      const NumericConfig& cfg = {}) {
  using Slot = std::optional<std::vector<Complex>>;
  std::vector<Slot> out(points.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = sheets_at(curve, points[i], cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AtBranchPoint) throw;
      }
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, points.size() / 256));
  const std::size_t chunk = (points.size() + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(points.size(), begin + chunk);
    if (begin >= end) break;
    jobs.push_back(std::async(std::launch::async, work, begin, end));
  }
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace spectral_patch
