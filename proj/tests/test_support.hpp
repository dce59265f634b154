#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check: determinants are Leibniz sums over permutations,
// resultants come from root products, polynomials from factored forms.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "spectral_patch/spectral_patch.hpp"

namespace spectral_patch::testing {

/// sum over permutations of sign * prod a[i][perm[i]].
template <typename Ring>
Ring leibniz_determinant(const std::vector<Ring>& a, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Ring total{};
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Ring term = a[perm[0]];
    for (std::size_t i = 1; i < n; ++i) term = term * a[i * n + perm[i]];
    if (inversions % 2 == 0)
      total += term;
    else
      total -= term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Ascending Sylvester matrix built independently of the library helper.
inline std::vector<Complex> sylvester_oracle(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  const std::size_t m = p.size() - 1, n = q.size() - 1, s = m + n;
  std::vector<Complex> out(s * s);
  for (std::size_t row = 0; row < s; ++row) {
    const bool from_p = row < n;
    const auto& src = from_p ? p : q;
    const std::size_t shift = from_p ? row : row - n;
    for (std::size_t k = 0; k < src.size(); ++k) out[row * s + shift + k] = src[k];
  }
  return out;
}

/// lead * prod (z - r_i), expanded by repeated multiplication of coefficient lists.
inline std::vector<Complex> expand_roots(const std::vector<Complex>& roots, Complex lead = 1.0) {
  std::vector<Complex> c{lead};
  for (auto r : roots) {
    std::vector<Complex> next(c.size() + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return c;
}

/// Textbook resultant lc(p)^deg(q) prod q(alpha) over roots alpha of p,
/// converted to the ascending Sylvester layout: times (-1)^(deg p deg q).
inline Complex resultant_from_roots(const std::vector<Complex>& p_roots, Complex p_lead,
                                    const std::vector<Complex>& q_coeffs) {
  const std::size_t m = p_roots.size(), n = q_coeffs.size() - 1;
  Complex out = std::pow(p_lead, static_cast<double>(n));
  for (auto a : p_roots) {
    Complex v{};
    for (std::size_t k = q_coeffs.size(); k-- > 0;) v = v * a + q_coeffs[k];
    out *= v;
  }
  return (m * n) % 2 == 0 ? out : -out;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Complex complex(double scale = 1.0) { return {real(-scale, scale), real(-scale, scale)}; }

  /// Random polynomial of exactly the given degree.
  Poly poly(int degree, double scale = 1.0) {
    std::vector<Complex> c;
    for (int i = 0; i <= degree; ++i) c.push_back(complex(scale));
    while (std::abs(c.back()) < 0.2) c.back() = complex(scale);
    return Poly(std::move(c));
  }

  /// Random polynomial of degree 0..max_degree (possibly zero-sized entries excluded).
  Poly poly_upto(int max_degree, double scale = 1.0) { return poly(integer(0, max_degree), scale); }

  PolyMatrix poly_matrix(std::size_t rank, int max_degree, double scale = 1.0) {
    std::vector<Poly> e;
    for (std::size_t i = 0; i < rank * rank; ++i) e.push_back(poly_upto(max_degree, scale));
    return PolyMatrix(rank, std::move(e));
  }

  ConstMatrix const_matrix(std::size_t rank, double scale = 1.0) {
    std::vector<Complex> e;
    for (std::size_t i = 0; i < rank * rank; ++i) e.push_back(complex(scale));
    return ConstMatrix(rank, std::move(e));
  }

  /// Invertible with |det| bounded away from zero and moderate conditioning.
  ConstMatrix invertible(std::size_t rank) {
    for (;;) {
      auto p = const_matrix(rank);
      const auto d = leibniz_determinant(p.entries(), rank);
      if (std::abs(d) > 0.3) return p;
    }
  }

  /// Points in the disk of radius `radius` pairwise at least `min_sep` apart.
  std::vector<Complex> separated_points(std::size_t count, double radius, double min_sep) {
    std::vector<Complex> out;
    while (out.size() < count) {
      const Complex c = complex(radius);
      if (std::abs(c) > radius) continue;
      if (std::all_of(out.begin(), out.end(), [&](Complex o) { return std::abs(o - c) >= min_sep; }))
        out.push_back(c);
    }
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Numeric determinant of l I - a.
inline Complex shifted_det(const ConstMatrix& a, Complex lambda) {
  std::vector<Complex> e = a.entries();
  for (auto& v : e) v = -v;
  for (std::size_t i = 0; i < a.rank(); ++i) e[i * a.rank() + i] += lambda;
  return leibniz_determinant(e, a.rank());
}

}  // namespace spectral_patch::testing
