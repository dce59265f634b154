#pragma once

// Square matrices with polynomial (or constant) entries, their determinants,
// characteristic polynomials and the Hitchin map.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "spectral_patch/error.hpp"
#include "spectral_patch/numfield.hpp"

namespace spectral_patch {

inline constexpr std::size_t kMaxRank = 4;

/// Entry-degree cap for user-supplied matrices.
inline constexpr int kMaxEntryDegree = 32;

/// Cap enforced on every PolyMatrix: large enough to hold the companion
/// section of the characteristic data of any admissible input.
inline constexpr int kMaxSectionDegree = static_cast<int>(kMaxRank) * kMaxEntryDegree;

template <typename T>
T ring_one();
template <>
inline Complex ring_one<Complex>() { return Complex{1.0}; }
template <>
inline Poly ring_one<Poly>() { return Poly::constant(1.0); }

/// Row-major square matrix of rank 1..kMaxRank.
template <typename T>
class Matrix {
 public:
  explicit Matrix(std::size_t rank) : Matrix(rank, std::vector<T>(rank * rank)) {}

  Matrix(std::size_t rank, std::vector<T> entries) : rank_(rank), entries_(std::move(entries)) {
    if (rank_ == 0) throw Error(ErrorCode::InvalidArgument, "matrix rank must be at least 1");
    if (rank_ > kMaxRank)
      throw Error(ErrorCode::RankTooLarge, "rank " + std::to_string(rank_) + " exceeds " + std::to_string(kMaxRank));
    if (entries_.size() != rank_ * rank_) throw Error(ErrorCode::InvalidArgument, "matrix grid is not square");
    for (const auto& e : entries_) {
      if constexpr (std::is_same_v<T, Poly>) {
        if (e.degree() > kMaxSectionDegree)
          throw Error(ErrorCode::InvalidArgument, "entry degree exceeds " + std::to_string(kMaxSectionDegree));
      } else {
        require_finite(e, "matrix entry");
      }
    }
  }

  Matrix(std::initializer_list<std::initializer_list<T>> rows) : Matrix(rows.size(), flatten(rows)) {}

  static Matrix identity(std::size_t rank) {
    Matrix m(rank);
    for (std::size_t i = 0; i < rank; ++i) m.entries_[i * rank + i] = ring_one<T>();
    return m;
  }

  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.entries_[i * d.size() + i] = d[i];
    return m;
  }

  std::size_t rank() const { return rank_; }
  const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * rank_ + j]; }
  const std::vector<T>& entries() const { return entries_; }

  void set(std::size_t i, std::size_t j, T value) {
    if constexpr (!std::is_same_v<T, Poly>) require_finite(value, "matrix entry");
    entries_[i * rank_ + j] = std::move(value);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  static std::vector<T> flatten(std::initializer_list<std::initializer_list<T>> rows) {
    std::vector<T> out;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw Error(ErrorCode::InvalidArgument, "matrix grid is not square");
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::size_t rank_;
  std::vector<T> entries_;
};

using PolyMatrix = Matrix<Poly>;
using ConstMatrix = Matrix<Complex>;

inline ConstMatrix mat_eval(const PolyMatrix& m, Complex z) {
  std::vector<Complex> out;
  out.reserve(m.entries().size());
  for (const auto& p : m.entries()) out.push_back(p(z));
  return ConstMatrix(m.rank(), std::move(out));
}

inline PolyMatrix to_poly_matrix(const ConstMatrix& a) {
  std::vector<Poly> out;
  out.reserve(a.entries().size());
  for (auto c : a.entries()) out.push_back(Poly::constant(c));
  return PolyMatrix(a.rank(), std::move(out));
}

/// True when every entry has degree <= 0.
inline bool is_constant(const PolyMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(), [](const Poly& p) { return p.degree() <= 0; });
}

/// Cofactor expansion over the polynomial ring; no polynomial division.
inline Poly mat_det(const PolyMatrix& m) { return cofactor_determinant(m.entries(), m.rank()); }

inline Complex det(const ConstMatrix& a) { return cofactor_determinant(a.entries(), a.rank()); }

template <typename T>
T trace(const Matrix<T>& m) {
  T t{};
  for (std::size_t i = 0; i < m.rank(); ++i) t += m(i, i);
  return t;
}

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rank() != b.rank()) throw Error(ErrorCode::RankMismatch, "matrix product of different ranks");
  const std::size_t n = a.rank();
  std::vector<T> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a(i, k) == T{}) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a(i, k) * b(k, j);
    }
  return Matrix<T>(n, std::move(out));
}

/// chi(l, z) = l^r + coeffs[r-1](z) l^(r-1) + ... + coeffs[0](z); monic in l.
/// This is a point of the Hitchin base: for r = 2, coeffs = (det, -tr).
struct CharData {
  std::size_t rank = 0;
  std::vector<Poly> coeffs;

  /// chi(., z) as a monic polynomial in l.
  Poly at(Complex z) const {
    std::vector<Complex> c;
    c.reserve(rank + 1);
    for (const auto& p : coeffs) c.push_back(p(z));
    c.push_back(Complex{1.0});
    return Poly(std::move(c));
  }

  Complex operator()(Complex lambda, Complex z) const { return at(z)(lambda); }

  friend bool operator==(const CharData&, const CharData&) = default;
};

/// Largest coefficient deviation across all polynomial coefficients.
inline double max_coeff_diff(const CharData& a, const CharData& b) {
  if (a.rank != b.rank) throw Error(ErrorCode::RankMismatch, "comparing characteristic data of different ranks");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rank; ++i) worst = std::max(worst, max_coeff_diff(a.coeffs[i], b.coeffs[i]));
  return worst;
}

/// det(l I - m) by Faddeev-LeVerrier over the polynomial ring:
///   M_1 = I,  c_{n-k} = -tr(m M_k) / k,  M_{k+1} = m M_k + c_{n-k} I.
/// The only divisions are by the integers k.
inline CharData char_poly(const PolyMatrix& m) {
  const std::size_t n = m.rank();
  const auto& a = m.entries();
  CharData out{n, std::vector<Poly>(n)};
  std::vector<Poly> mk(n * n);
  for (std::size_t i = 0; i < n; ++i) mk[i * n + i] = Poly::constant(1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Poly> amk(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (a[i * n + l].is_zero()) continue;
        for (std::size_t j = 0; j < n; ++j) amk[i * n + j] += a[i * n + l] * mk[l * n + j];
      }
    Poly tr;
    for (std::size_t i = 0; i < n; ++i) tr += amk[i * n + i];
    Poly c = tr * Complex{-1.0 / static_cast<double>(k)};
    out.coeffs[n - k] = c;
    if (k == n) break;
    mk = std::move(amk);
    for (std::size_t i = 0; i < n; ++i) mk[i * n + i] += c;
  }
  return out;
}

inline Poly char_poly(const ConstMatrix& a) { return char_poly(to_poly_matrix(a)).at(Complex{}); }

/// The map from a polynomial matrix to its point of the Hitchin base; the
/// same data as char_poly.
inline CharData hitchin_map(const PolyMatrix& m) { return char_poly(m); }

/// Gauss-Jordan inverse with partial pivoting.
namespace detail {

/// Gauss-Jordan with partial pivoting on a row-major n x n array.
template <typename C>
std::vector<C> gauss_jordan_inverse(std::vector<C> a, std::size_t n) {
  std::vector<C> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = C(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[pivot * n + k])) pivot = i;
    if (pivot != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[k * n + j], a[pivot * n + j]);
        std::swap(inv[k * n + j], inv[pivot * n + j]);
      }
    const C d = a[k * n + k];
    for (std::size_t j = 0; j < n; ++j) {
      a[k * n + j] /= d;
      inv[k * n + j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const C f = a[i * n + k];
      if (f == C{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[i * n + j] -= f * a[k * n + j];
        inv[i * n + j] -= f * inv[k * n + j];
      }
    }
  }
  return inv;
}

}  // namespace detail

inline ConstMatrix inverse(const ConstMatrix& p, const NumericConfig& cfg = {}) {
  if (std::abs(det(p)) <= cfg.eq_tol) throw Error(ErrorCode::Singular, "matrix is not invertible");
  return ConstMatrix(p.rank(), detail::gauss_jordan_inverse(p.entries(), p.rank()));
}

/// P^-1 m P for a constant invertible P. P^-1 is computed numerically once;
/// the products are exact polynomial arithmetic.
inline PolyMatrix conjugate(const PolyMatrix& m, const ConstMatrix& p, const NumericConfig& cfg = {}) {
  if (m.rank() != p.rank()) throw Error(ErrorCode::RankMismatch, "conjugating matrix has a different rank");
  const ConstMatrix pinv = inverse(p, cfg);
  const std::size_t n = m.rank();
  std::vector<Poly> mp(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < n; ++j)
        if (p(l, j) != Complex{}) mp[i * n + j] += m(i, l) * p(l, j);
  std::vector<Poly> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (pinv(i, k) != Complex{})
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] += pinv(i, k) * mp[k * n + j];
  return PolyMatrix(n, std::move(out));
}

inline ConstMatrix conjugate(const ConstMatrix& a, const ConstMatrix& p, const NumericConfig& cfg = {}) {
  if (a.rank() != p.rank()) throw Error(ErrorCode::RankMismatch, "conjugating matrix has a different rank");
  if (std::abs(det(p)) <= cfg.eq_tol) throw Error(ErrorCode::Singular, "matrix is not invertible");
  // Extended precision throughout, one rounding per output entry.
  using Wide = std::complex<long double>;
  const std::size_t n = a.rank();
  std::vector<Wide> wa(a.entries().begin(), a.entries().end()), wp(p.entries().begin(), p.entries().end());
  const std::vector<Wide> winv = detail::gauss_jordan_inverse(wp, n);
  std::vector<Wide> ap(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < n; ++j) ap[i * n + j] += wa[i * n + l] * wp[l * n + j];
  std::vector<Complex> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Wide acc{};
      for (std::size_t k = 0; k < n; ++k) acc += winv[i * n + k] * ap[k * n + j];
      out[i * n + j] = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
  return ConstMatrix(n, std::move(out));
}

}  // namespace spectral_patch
