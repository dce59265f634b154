#pragma once

// Similarity classes of constant 2x2 matrices: the three normal forms
// (distinct diagonal, scalar, Jordan block), the stability predicate that
// discards Jordan classes, unordered eigenvalue tuples and the (tr, det)
// coordinates on the moduli space.

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "spectral_patch/error.hpp"
#include "spectral_patch/numfield.hpp"
#include "spectral_patch/polymat.hpp"

namespace spectral_patch {

/// Eigenvalues as an unordered multiset, stored in canonical (re, im) order.
struct EigenTuple {
  std::vector<Root> values;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& r : values) n += r.multiplicity;
    return n;
  }
};

enum class SimilarityKind { Distinct, Scalar, Jordan };

constexpr std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::Distinct: return "Distinct";
    case SimilarityKind::Scalar: return "Scalar";
    case SimilarityKind::Jordan: return "Jordan";
  }
  return "Unknown";
}

struct SimilarityClass {
  SimilarityKind kind;
  EigenTuple eigen;
};

struct ModuliPoint {
  Complex trace;
  Complex determinant;
};

/// Clusters values closer than cluster_tol (single linkage), represents each
/// cluster by its mean and returns them in canonical order. Depends only on
/// the multiset of inputs, never on their order.
inline EigenTuple canonical_eigen(std::vector<Complex> values, const NumericConfig& cfg = {}) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "canonical_eigen of an empty list");
  for (auto v : values) require_finite(v, "eigenvalue");
  canonical_sort(values, 0.0);
  const auto groups = detail::components(values.size(), [&](std::size_t i, std::size_t j) {
    return std::abs(values[i] - values[j]) <= cfg.cluster_tol;
  });
  EigenTuple out;
  for (const auto& g : groups) {
    Complex sum{};
    for (auto i : g) sum += values[i];
    out.values.push_back({sum / static_cast<double>(g.size()), static_cast<int>(g.size())});
  }
  canonical_sort(out.values, cfg.eq_tol);
  return out;
}

/// Elementwise comparison of two tuples within cluster_tol.
inline bool same_eigen(const EigenTuple& a, const EigenTuple& b, const NumericConfig& cfg = {}) {
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i].multiplicity != b.values[i].multiplicity) return false;
    if (std::abs(a.values[i].value - b.values[i].value) > cfg.cluster_tol) return false;
  }
  return true;
}

/// Eigenvalues of a constant matrix of any admissible rank, via the roots of
/// its characteristic polynomial.
inline EigenTuple eigenvalues(const ConstMatrix& a, const NumericConfig& cfg = {}) {
  return EigenTuple{poly_roots(char_poly(a), cfg)};
}

namespace detail {

inline void require_rank2(const ConstMatrix& a) {
  if (a.rank() != 2) throw Error(ErrorCode::RankMismatch, "expected a 2x2 matrix");
}

/// Both eigenvalues of a 2x2 matrix. The discriminant is formed as
/// (a - d)^2 + 4bc, which avoids the cancellation in tr^2 - 4 det.
/// Triangular input returns its diagonal exactly, so normal forms are fixed
/// points.
inline std::pair<Complex, Complex> eigen_pair(const ConstMatrix& a) {
  if (a(0, 1) == Complex{} || a(1, 0) == Complex{}) return {a(0, 0), a(1, 1)};
  using Wide = std::complex<long double>;
  const Wide p(a(0, 0)), q(a(0, 1)), r(a(1, 0)), s(a(1, 1));
  const Wide half_tr = (p + s) / 2.0L;
  const Wide root = std::sqrt((p - s) * (p - s) + 4.0L * q * r) / 2.0L;
  auto narrow = [](Wide w) { return Complex(static_cast<double>(w.real()), static_cast<double>(w.imag())); };
  return {narrow(half_tr - root), narrow(half_tr + root)};
}

}  // namespace detail

/// Decides which normal form the class of a 2x2 matrix has:
///   Distinct  eigenvalues separated by more than cluster_tol
///   Scalar    otherwise, and a within eq_tol (Frobenius) of l I
///   Jordan    otherwise
inline SimilarityClass classify_2x2(const ConstMatrix& a, const NumericConfig& cfg = {}) {
  detail::require_rank2(a);
  const auto [l1, l2] = detail::eigen_pair(a);
  if (std::abs(l1 - l2) > cfg.cluster_tol) {
    std::vector<Root> v{{l1, 1}, {l2, 1}};
    canonical_sort(v, cfg.eq_tol);
    return {SimilarityKind::Distinct, EigenTuple{std::move(v)}};
  }
  const Complex lambda = (a(0, 0) + a(1, 1)) / 2.0;
  const double frob = std::sqrt(std::norm(a(0, 0) - lambda) + std::norm(a(0, 1)) + std::norm(a(1, 0)) +
                                std::norm(a(1, 1) - lambda));
  const auto kind = frob <= cfg.eq_tol ? SimilarityKind::Scalar : SimilarityKind::Jordan;
  return {kind, EigenTuple{{{lambda, 2}}}};
}

/// The stability predicate: diagonalizable (Distinct or Scalar) classes are
/// kept, Jordan classes are discarded.
inline bool is_semisimple(const ConstMatrix& a, const NumericConfig& cfg = {}) {
  return classify_2x2(a, cfg).kind != SimilarityKind::Jordan;
}

inline ModuliPoint moduli_point(const EigenTuple& t) {
  if (t.total_multiplicity() != 2)
    throw Error(ErrorCode::WrongRank, "moduli_point needs two eigenvalues counted with multiplicity");
  std::vector<Complex> flat;
  for (const auto& r : t.values)
    for (int k = 0; k < r.multiplicity; ++k) flat.push_back(r.value);
  return {flat[0] + flat[1], flat[0] * flat[1]};
}

/// l^2 - tr l + det.
inline Poly characteristic_quadratic(const ModuliPoint& p) { return Poly{p.determinant, -p.trace, 1.0}; }

/// Two 2x2 matrices are similar iff they have the same normal form.
inline bool similar(const ConstMatrix& a, const ConstMatrix& b, const NumericConfig& cfg = {}) {
  detail::require_rank2(a);
  detail::require_rank2(b);
  const auto ca = classify_2x2(a, cfg);
  const auto cb = classify_2x2(b, cfg);
  return ca.kind == cb.kind && same_eigen(ca.eigen, cb.eigen, cfg);
}

/// The representative diag(l1, l2), l I, or [[l, 1], [0, l]] of the class
/// of a, eigenvalues in canonical order.
inline ConstMatrix normal_form(const ConstMatrix& a, const NumericConfig& cfg = {}) {
  const auto cls = classify_2x2(a, cfg);
  const auto& v = cls.eigen.values;
  switch (cls.kind) {
    case SimilarityKind::Distinct: return ConstMatrix::diagonal({v[0].value, v[1].value});
    case SimilarityKind::Scalar: return ConstMatrix::diagonal({v[0].value, v[0].value});
    case SimilarityKind::Jordan: return ConstMatrix{{v[0].value, 1.0}, {0.0, v[0].value}};
  }
  return a;
}

}  // namespace spectral_patch
