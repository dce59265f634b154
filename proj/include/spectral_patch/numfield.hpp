#pragma once

// Scalar and polynomial kernel: complex arithmetic on dense univariate
// polynomials, simultaneous-iteration root finding, resultants and
// discriminants.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectral_patch/error.hpp"

namespace spectral_patch {

using Complex = std::complex<double>;

/// Absolute threshold below which trailing polynomial coefficients are
/// dropped. Matches the default NumericConfig::eq_tol.
inline constexpr double kTrimTol = 1e-9;

struct NumericConfig {
  double eq_tol = 1e-9;       // scalar equality
  double cluster_tol = 1e-7;  // radius for merging near-equal roots
  int max_iter = 200;         // root-finder iteration cap
  int loop_nodes = 256;       // discretization of monodromy loops

  void validate() const {
    if (!(eq_tol > 0.0) || !(cluster_tol > 0.0) || !std::isfinite(eq_tol) ||
        !std::isfinite(cluster_tol))
      throw Error(ErrorCode::InvalidArgument, "tolerances must be finite and strictly positive");
    if (eq_tol > cluster_tol)
      throw Error(ErrorCode::InvalidArgument, "eq_tol must not exceed cluster_tol");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
    if (loop_nodes < 3) throw Error(ErrorCode::InvalidArgument, "loop_nodes must be at least 3");
  }
};

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

inline void require_finite(Complex c, const char* what) {
  if (!is_finite(c)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
}

/// Dense polynomial over C with ascending coefficients: coeffs()[i] multiplies z^i.
/// Always normalized: the last stored coefficient exceeds kTrimTol in
/// magnitude, and the empty list is the zero polynomial.
class Poly {
 public:
  Poly() = default;

  explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {
    for (const auto& c : c_) require_finite(c, "polynomial coefficient");
    trim();
  }

  Poly(std::initializer_list<Complex> coeffs) : Poly(std::vector<Complex>(coeffs)) {}

  static Poly constant(Complex c) { return Poly(std::vector<Complex>{c}); }

  /// c * z^degree
  static Poly monomial(Complex c, std::size_t degree) {
    std::vector<Complex> v(degree + 1);
    v[degree] = c;
    return Poly(std::move(v));
  }

  bool is_zero() const { return c_.empty(); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  std::span<const Complex> coeffs() const { return c_; }

  /// Coefficient of z^i; zero past the degree.
  Complex operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Complex{}; }

  Complex leading() const { return c_.empty() ? Complex{} : c_.back(); }

  /// Horner evaluation.
  /// Horner in extended precision, rounded once.
  Complex operator()(Complex z) const {
    using Wide = std::complex<long double>;
    const Wide w(z);
    Wide acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * w + Wide(*it);
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }

  Poly& operator*=(Complex s) {
    for (auto& c : c_) c *= s;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Complex{-1.0}; }
  friend Poly operator*(Poly a, Complex s) { return a *= s; }
  friend Poly operator*(Complex s, Poly a) { return a *= s; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(out));
  }

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void trim() {
    while (!c_.empty() && std::abs(c_.back()) <= kTrimTol) c_.pop_back();
  }

  std::vector<Complex> c_;
};

inline Complex poly_eval(const Poly& p, Complex z) { return p(z); }

inline Poly derivative(const Poly& p) {
  if (p.degree() < 1) return {};
  std::vector<Complex> out(static_cast<std::size_t>(p.degree()));
  for (std::size_t i = 1; i < p.coeffs().size(); ++i) out[i - 1] = p[i] * static_cast<double>(i);
  return Poly(std::move(out));
}

/// Largest coefficient-wise absolute difference; handy for comparisons.
inline double max_coeff_diff(const Poly& a, const Poly& b) {
  const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// A root (or eigenvalue) together with its multiplicity.
struct Root {
  Complex value;
  int multiplicity = 1;

  friend bool operator==(const Root&, const Root&) = default;
};

// ---------------------------------------------------------------------------
// Canonical order on C: lexicographic in (re, im), where real parts within
// eq_tol of each other count as equal and the imaginary part decides.

inline bool canonical_less(Complex a, Complex b, double eq_tol) {
  if (std::abs(a.real() - b.real()) > eq_tol) return a.real() < b.real();
  return a.imag() < b.imag();
}

/// Sorts into canonical order. The tolerant comparison is not a strict weak
/// ordering, so the values are first sorted exactly and then runs with
/// tied real parts are reordered by imaginary part. The result depends only
/// on the multiset of inputs.
template <typename T, typename Proj>
void canonical_sort(std::vector<T>& items, double eq_tol, Proj value_of) {
  std::sort(items.begin(), items.end(), [&](const T& x, const T& y) {
    const Complex a = value_of(x), b = value_of(y);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::size_t start = 0;
  while (start < items.size()) {
    std::size_t end = start + 1;
    while (end < items.size() &&
           std::abs(value_of(items[end]).real() - value_of(items[end - 1]).real()) <= eq_tol)
      ++end;
    std::stable_sort(items.begin() + static_cast<std::ptrdiff_t>(start),
                     items.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](const T& x, const T& y) { return value_of(x).imag() < value_of(y).imag(); });
    start = end;
  }
}

inline void canonical_sort(std::vector<Complex>& values, double eq_tol) {
  canonical_sort(values, eq_tol, [](Complex c) { return c; });
}

inline void canonical_sort(std::vector<Root>& roots, double eq_tol) {
  canonical_sort(roots, eq_tol, [](const Root& r) { return r.value; });
}

namespace detail {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

/// Groups indices into connected components of `linked`, each component
/// listed in ascending index order, components ordered by smallest index.
template <typename Linked>
std::vector<std::vector<std::size_t>> components(std::size_t n, Linked linked) {
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (linked(i, j)) sets.unite(i, j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (slot[r] == n) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

/// Horner evaluation of p and p' plus a running rounding-error bound for p.
struct HornerResult {
  Complex value;
  Complex slope;
  double error_bound;
};

inline HornerResult horner_with_bound(std::span<const Complex> a, Complex z) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Complex p{}, dp{};
  double absolute = 0.0;
  const double az = std::abs(z);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
    absolute = absolute * az + std::abs(*it);
  }
  const double n = static_cast<double>(a.size());
  return {p, dp, 2.0 * (n + 1.0) * eps * absolute};
}

/// Newton polish of a cluster centroid on the (m-1)-th derivative, where a
/// root of multiplicity m becomes simple. Only accepted while it stays
/// within `reach` of the starting point.
inline Complex polish_multiple_root(const Poly& p, int multiplicity, Complex start, double reach) {
  Poly d = p;
  for (int k = 1; k < multiplicity; ++k) d = derivative(d);
  const Poly dd = derivative(d);
  Complex z = start;
  for (int it = 0; it < 8; ++it) {
    const Complex f = d(z), df = dd(z);
    if (df == Complex{}) break;
    const Complex next = z - f / df;
    if (!is_finite(next) || std::abs(next - start) > reach) break;
    if (std::abs(d(next)) >= std::abs(f)) break;
    z = next;
  }
  return z;
}

}  // namespace detail

/// Roots of p with multiplicities, in canonical (re, im) order.
///
/// Aberth-Ehrlich simultaneous iteration from deterministically perturbed
/// starting points on the circle of radius 1 + max|c_i / c_n|. Each
/// approximation is frozen once |p(z)| drops to its rounding-error bound.
/// Approximations whose inclusion disks overlap (the numerical signature of
/// a multiple root) are merged and the centroid is polished; finally any
/// representatives within cluster_tol of each other are merged as well.
inline std::vector<Root> poly_roots(const Poly& p, const NumericConfig& cfg = {}) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "poly_roots of the zero polynomial");
  std::vector<Root> out;

  // Exact zero roots are peeled off first.
  std::size_t zeros = 0;
  while (p[zeros] == Complex{}) ++zeros;
  if (zeros > 0) out.push_back({Complex{}, static_cast<int>(zeros)});

  const Complex lead = p.leading();
  std::vector<Complex> a(p.coeffs().begin() + static_cast<std::ptrdiff_t>(zeros), p.coeffs().end());
  for (auto& c : a) c /= lead;
  const std::size_t n = a.size() - 1;

  std::vector<Complex> z;
  std::vector<double> bound(n, 0.0);
  if (n == 1) {
    z.push_back(-a[0]);
  } else if (n > 1) {
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(a[i]));
    radius += 1.0;
    std::mt19937_64 rng(0x5eed'a8e7'40f1'2c3bULL);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const double offset = 0.4;
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = offset + (2.0 * std::numbers::pi * (static_cast<double>(k) + jitter(rng))) /
                                        static_cast<double>(n);
      z.push_back(std::polar(radius * (1.0 + 0.1 * jitter(rng)), angle));
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::vector<bool> frozen(n, false);
    auto all_frozen = [&] { return std::all_of(frozen.begin(), frozen.end(), [](bool f) { return f; }); };
    for (int iter = 0; iter < cfg.max_iter && !all_frozen(); ++iter) {
      for (std::size_t i = 0; i < n; ++i) {
        if (frozen[i]) continue;
        const auto h = detail::horner_with_bound(a, z[i]);
        if (std::abs(h.value) <= h.error_bound) {
          frozen[i] = true;
          continue;
        }
        Complex repulsion{};
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          Complex diff = z[i] - z[j];
          if (diff == Complex{}) diff = Complex{eps, eps} * (1.0 + std::abs(z[i]));
          repulsion += 1.0 / diff;
        }
        Complex denom = h.slope - h.value * repulsion;
        if (denom == Complex{}) denom = Complex{eps, 0.0};
        const Complex step = h.value / denom;
        if (!is_finite(step)) continue;
        z[i] -= step;
        if (std::abs(step) <= 2.0 * eps * std::abs(z[i])) frozen[i] = true;
      }
    }
    if (!all_frozen())
      throw Error(ErrorCode::NoConvergence,
                  "root finder exceeded " + std::to_string(cfg.max_iter) + " iterations");
  }

  for (std::size_t i = 0; i < z.size(); ++i) bound[i] = detail::horner_with_bound(a, z[i]).error_bound;

  // Inclusion radii n * |p(z_i)| / prod |z_i - z_j|, with |p| padded by its
  // rounding bound so that noise-level residuals still give honest disks.
  std::vector<double> radius(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j)
      if (j != i) prod *= std::abs(z[i] - z[j]);
    const double residual = std::abs(detail::horner_with_bound(a, z[i]).value) + bound[i];
    radius[i] = prod > 0.0 ? static_cast<double>(n) * residual / prod
                           : std::numeric_limits<double>::infinity();
  }

  const Poly reduced{std::vector<Complex>(a)};
  const auto groups = detail::components(z.size(), [&](std::size_t i, std::size_t j) {
    const double d = std::abs(z[i] - z[j]);
    return d <= radius[i] + radius[j] || d <= cfg.cluster_tol;
  });
  for (const auto& g : groups) {
    std::vector<Complex> members;
    for (auto i : g) members.push_back(z[i]);
    canonical_sort(members, 0.0);
    Complex centroid{};
    for (auto m : members) centroid += m;
    centroid /= static_cast<double>(members.size());
    if (members.size() > 1) {
      double spread = 0.0;
      for (auto m : members) spread = std::max(spread, std::abs(m - centroid));
      centroid = detail::polish_multiple_root(reduced, static_cast<int>(members.size()), centroid,
                                              std::max(spread, cfg.cluster_tol));
    }
    out.push_back({centroid, static_cast<int>(members.size())});
  }

  // Final contract: representatives within cluster_tol are one root.
  canonical_sort(out, 0.0);
  const auto merged = detail::components(out.size(), [&](std::size_t i, std::size_t j) {
    return std::abs(out[i].value - out[j].value) <= cfg.cluster_tol;
  });
  std::vector<Root> result;
  for (const auto& g : merged) {
    Complex weighted{};
    int mult = 0;
    for (auto i : g) {
      weighted += out[i].value * static_cast<double>(out[i].multiplicity);
      mult += out[i].multiplicity;
    }
    result.push_back({weighted / static_cast<double>(mult), mult});
  }
  canonical_sort(result, cfg.eq_tol);
  return result;
}

// ---------------------------------------------------------------------------
// Determinants and resultants.

/// Division-free cofactor (Laplace) expansion over any commutative ring,
/// memoized on the set of consumed columns: O(2^n n) ring operations.
/// `a` is row-major n x n, n >= 1.
template <typename Ring>
Ring cofactor_determinant(const std::vector<Ring>& a, std::size_t n) {
  if (n == 0 || a.size() != n * n)
    throw Error(ErrorCode::InvalidArgument, "cofactor_determinant needs a non-empty square matrix");
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<std::optional<Ring>> memo(full + 1);
  auto minor = [&](auto&& self, std::size_t used) -> Ring {
    const std::size_t row = static_cast<std::size_t>(std::popcount(used));
    if (row + 1 == n) {
      for (std::size_t j = 0; j < n; ++j)
        if (!(used >> j & 1u)) return a[row * n + j];
    }
    if (memo[used]) return *memo[used];
    Ring total{};
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (used >> j & 1u) continue;
      const Ring& entry = a[row * n + j];
      if (!(entry == Ring{})) {
        Ring term = entry * self(self, used | (std::size_t{1} << j));
        if (sign > 0)
          total += term;
        else
          total -= term;
      }
      sign = -sign;
    }
    memo[used] = total;
    return total;
  };
  return minor(minor, 0);
}

/// Determinant by LU factorization with partial pivoting; for numeric
/// matrices too large for cofactor expansion.
inline Complex lu_determinant(std::vector<Complex> a, std::size_t n) {
  if (a.size() != n * n) throw Error(ErrorCode::InvalidArgument, "lu_determinant needs a square matrix");
  Complex det{1.0};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[pivot * n + k])) pivot = i;
    if (a[pivot * n + k] == Complex{}) return Complex{};
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
      det = -det;
    }
    const Complex d = a[k * n + k];
    det *= d;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a[i * n + k] / d;
      if (f == Complex{}) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return det;
}

/// Sylvester matrix of two coefficient sequences (ascending order, degrees
/// m = p.size()-1 and n = q.size()-1): n shifted rows of p followed by m
/// shifted rows of q, each row laid out from the constant term upward.
/// Row-major (m+n) x (m+n).
template <typename Ring>
std::vector<Ring> sylvester_matrix(const std::vector<Ring>& p, const std::vector<Ring>& q) {
  const std::size_t m = p.size() - 1, n = q.size() - 1, size = m + n;
  std::vector<Ring> s(size * size);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) s[r * size + r + i] = p[i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) s[(n + r) * size + r + i] = q[i];
  return s;
}

/// Determinant of the Sylvester matrix of p and q. Vanishes exactly when p
/// and q share a root. With the ascending row layout this equals
/// (-1)^(deg p * deg q) times the descending-layout resultant, so that
/// resultant(z - a, z - b) = b - a.
inline Complex resultant(const Poly& p, const Poly& q) {
  if (p.is_zero() || q.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "resultant with a zero polynomial");
  std::vector<Complex> pc(p.coeffs().begin(), p.coeffs().end());
  std::vector<Complex> qc(q.coeffs().begin(), q.coeffs().end());
  const std::size_t size = pc.size() + qc.size() - 2;
  if (size == 0) return Complex{1.0};
  return lu_determinant(sylvester_matrix(pc, qc), size);
}

/// (-1)^(n(n-1)/2) * resultant(p, p') for monic p of degree n >= 2, so the
/// discriminant of l^2 + b l + c is b^2 - 4c.
inline Complex discriminant(const Poly& p, const NumericConfig& cfg = {}) {
  if (p.degree() < 2) throw Error(ErrorCode::DegreeTooLow, "discriminant needs degree >= 2");
  if (std::abs(p.leading() - Complex{1.0}) > cfg.eq_tol)
    throw Error(ErrorCode::NotMonic, "discriminant needs a monic polynomial");
  const int n = p.degree();
  const Complex res = resultant(p, derivative(p));
  return (n * (n - 1) / 2) % 2 == 0 ? res : -res;
}

}  // namespace spectral_patch
