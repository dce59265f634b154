#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "spectral_patch/numfield.hpp"
#include "test_support.hpp"

namespace sp = spectral_patch;
using sp::Complex;
using sp::ErrorCode;
using sp::Poly;
using sp::testing::Gen;

namespace {

constexpr Complex I{0.0, 1.0};

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const sp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

double relative_error(Complex got, Complex want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST(PolyEval, Examples) {
  EXPECT_LT(std::abs(sp::poly_eval(Poly{1.0, 0.0, 1.0}, I)), 1e-15);
  EXPECT_EQ(sp::poly_eval(Poly{}, Complex{3.0, -7.0}), Complex{});
  // 4 * 0.25 by direct multiplication.
  EXPECT_EQ(sp::poly_eval(Poly{0.0, 4.0}, 0.25), Complex{4.0 * 0.25});
}

TEST(PolyArith, Examples) {
  EXPECT_EQ(Poly({1.0, 1.0}) * Poly({-1.0, 1.0}), (Poly{-1.0, 0.0, 1.0}));
  EXPECT_EQ(sp::derivative(Poly::monomial(1.0, 3)), Poly::monomial(3.0, 2));
  const Poly sum = Poly{1.0, 0.0, 1.0} + Poly{0.0, 0.0, -1.0};
  EXPECT_EQ(sum, Poly::constant(1.0));
  EXPECT_EQ(sum.degree(), 0);
}

TEST(PolyArith, TrimsNearZeroTrailingCoefficients) {
  const Poly p{1.0, 2.0, 1e-10};
  EXPECT_EQ(p.degree(), 1);
  EXPECT_TRUE((Poly{1e-12} * Complex{1.0}).is_zero());
  EXPECT_EQ(Poly{}.degree(), -1);
  EXPECT_TRUE(sp::derivative(Poly::constant(5.0)).is_zero());
}

TEST(PolyArith, RejectsNonFiniteCoefficients) {
  EXPECT_EQ(error_of([] { Poly p{1.0, std::numeric_limits<double>::quiet_NaN()}; }), ErrorCode::InvalidArgument);
}

TEST(PolyArith, EvalOfProductIsProductOfEvals) {
  Gen g(11);
  for (int t = 0; t < 300; ++t) {
    const Poly a = g.poly_upto(6), b = g.poly_upto(6);
    const Complex z = g.complex(2.0);
    const Complex want = a(z) * b(z);
    EXPECT_LE(std::abs((a * b)(z) - want), 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(PolyRoots, Examples) {
  const auto r1 = sp::poly_roots(Poly{1.0, 0.0, 1.0});
  ASSERT_EQ(r1.size(), 2u);
  EXPECT_LT(std::abs(r1[0].value + I), 1e-12);
  EXPECT_LT(std::abs(r1[1].value - I), 1e-12);
  EXPECT_EQ(r1[0].multiplicity, 1);

  // (z - 1)^2 (z + 2) = z^3 - 3z + 2
  const auto r2 = sp::poly_roots(Poly{2.0, -3.0, 0.0, 1.0});
  ASSERT_EQ(r2.size(), 2u);
  EXPECT_LT(std::abs(r2[0].value + 2.0), 1e-10);
  EXPECT_EQ(r2[0].multiplicity, 1);
  EXPECT_LT(std::abs(r2[1].value - 1.0), 1e-10);
  EXPECT_EQ(r2[1].multiplicity, 2);

  const auto r3 = sp::poly_roots(Poly{0.0, 4.0});
  ASSERT_EQ(r3.size(), 1u);
  EXPECT_EQ(r3[0].value, Complex{});
  EXPECT_EQ(r3[0].multiplicity, 1);
}

TEST(PolyRoots, Errors) {
  EXPECT_EQ(error_of([] { sp::poly_roots(Poly{}); }), ErrorCode::ZeroPolynomial);
  sp::NumericConfig cfg;
  cfg.max_iter = 1;
  EXPECT_EQ(error_of([&] { sp::poly_roots(Poly{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, cfg); }), ErrorCode::NoConvergence);
}

TEST(PolyRoots, ConstantHasNoRoots) { EXPECT_TRUE(sp::poly_roots(Poly::constant(3.0)).empty()); }

TEST(PolyRoots, HighMultiplicities) {
  // (z - 0.5)^4 (z + 1 - i)^3
  std::vector<Complex> roots{0.5, 0.5, 0.5, 0.5, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
  const auto got = sp::poly_roots(Poly(sp::testing::expand_roots(roots)));
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].multiplicity, 3);
  EXPECT_LT(std::abs(got[0].value - Complex{-1.0, 1.0}), 1e-8);
  EXPECT_EQ(got[1].multiplicity, 4);
  EXPECT_LT(std::abs(got[1].value - 0.5), 1e-8);
}

TEST(PolyRoots, CloseButDistinctRootsStaySeparate) {
  const auto got = sp::poly_roots(Poly(sp::testing::expand_roots({1.0, 1.0 + 1e-5, -2.0})));
  ASSERT_EQ(got.size(), 3u);
  for (const auto& r : got) EXPECT_EQ(r.multiplicity, 1);
}

TEST(PolyRoots, SortedCanonicallyAndDeterministic) {
  Gen g(5);
  for (int t = 0; t < 50; ++t) {
    const Poly p = g.poly(g.integer(1, 8), 2.0);
    const auto a = sp::poly_roots(p), b = sp::poly_roots(p);
    ASSERT_EQ(a, b);
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_FALSE(sp::canonical_less(a[i].value, a[i - 1].value, 1e-9));
  }
}

TEST(PolyRoots, RootsReconstructPolynomial) {
  Gen g(17);
  for (int t = 0; t < 200; ++t) {
    const Poly p = g.poly(g.integer(1, 8), 2.0);
    std::vector<Complex> flat;
    for (const auto& r : sp::poly_roots(p))
      for (int k = 0; k < r.multiplicity; ++k) flat.push_back(r.value);
    ASSERT_EQ(static_cast<int>(flat.size()), p.degree());
    const auto rebuilt = sp::testing::expand_roots(flat, p.leading());
    double scale = 0.0;
    for (auto c : p.coeffs()) scale = std::max(scale, std::abs(c));
    for (std::size_t i = 0; i < rebuilt.size(); ++i) EXPECT_LE(std::abs(rebuilt[i] - p[i]), 1e-6 * scale);
  }
}

TEST(Resultant, Examples) {
  const Poly p{1.0, -3.0, 0.5, 2.0};
  EXPECT_LT(std::abs(sp::resultant(p, p)), 1e-12);

  // 2x2 Sylvester determinant by hand: det [[-a, 1], [-b, 1]] = b - a.
  const Complex a{1.5, -0.5}, b{-2.0, 0.25};
  const Complex hand = (-a) * 1.0 - 1.0 * (-b);
  EXPECT_LT(std::abs(sp::resultant(Poly{-a, 1.0}, Poly{-b, 1.0}) - hand), 1e-14);
  EXPECT_LT(std::abs(hand - (b - a)), 1e-15);

  const auto oracle = sp::testing::leibniz_determinant(sp::testing::sylvester_oracle({0.0, 0.0, 1.0}, {1.0, 1.0}), 3);
  EXPECT_LT(std::abs(oracle - 1.0), 1e-15);
  EXPECT_LT(std::abs(sp::resultant(Poly::monomial(1.0, 2), Poly{1.0, 1.0}) - oracle), 1e-14);

  EXPECT_EQ(error_of([] { sp::resultant(Poly{}, Poly{1.0}); }), ErrorCode::ZeroPolynomial);
  EXPECT_EQ(sp::resultant(Poly::constant(2.0), Poly::constant(5.0)), Complex{1.0});
}

TEST(Resultant, MatchesLeibnizAndRootProductOracles) {
  Gen g(23);
  for (int t = 0; t < 100; ++t) {
    const auto p_roots = g.separated_points(static_cast<std::size_t>(g.integer(1, 4)), 1.5, 0.1);
    const Complex lead = g.complex() + 1.5;
    const Poly p(sp::testing::expand_roots(p_roots, lead));
    const Poly q = g.poly(g.integer(1, 3));
    const std::vector<Complex> pc(p.coeffs().begin(), p.coeffs().end()), qc(q.coeffs().begin(), q.coeffs().end());
    const Complex got = sp::resultant(p, q);
    const Complex leibniz = sp::testing::leibniz_determinant(sp::testing::sylvester_oracle(pc, qc), pc.size() + qc.size() - 2);
    const Complex product = sp::testing::resultant_from_roots(p_roots, lead, qc);
    EXPECT_LE(relative_error(got, leibniz), 1e-9);
    EXPECT_LE(relative_error(got, product), 1e-8);
  }
}

TEST(Resultant, VanishesExactlyOnCommonRoots) {
  Gen g(29);
  for (int t = 0; t < 100; ++t) {
    auto pts = g.separated_points(5, 2.0, 0.4);
    std::vector<Complex> pr{pts[0], pts[1]}, qr{pts[2], pts[3]};
    const bool share = t % 2 == 0;
    if (share) qr.push_back(pts[0]);
    else qr.push_back(pts[4]);
    const Complex res = sp::resultant(Poly(sp::testing::expand_roots(pr)), Poly(sp::testing::expand_roots(qr)));
    EXPECT_EQ(std::abs(res) <= 1e-9, share) << "res=" << res;
  }
}

TEST(Discriminant, Examples) {
  // b^2 - 4c with b = 0, c = -1 via the 3x3 Sylvester oracle of p and p'.
  const auto oracle = -sp::testing::leibniz_determinant(sp::testing::sylvester_oracle({-1.0, 0.0, 1.0}, {0.0, 2.0}), 3);
  EXPECT_LT(std::abs(oracle - 4.0), 1e-15);
  EXPECT_LT(std::abs(sp::discriminant(Poly{-1.0, 0.0, 1.0}) - oracle), 1e-13);
  EXPECT_LT(std::abs(sp::discriminant(Poly{1.0, -2.0, 1.0})), 1e-13);
  EXPECT_LT(std::abs(sp::discriminant(Poly{5.0, -2.0, 1.0}) - (4.0 - 20.0)), 1e-12);
}

TEST(Discriminant, Errors) {
  EXPECT_EQ(error_of([] { sp::discriminant(Poly{1.0, 1.0}); }), ErrorCode::DegreeTooLow);
  EXPECT_EQ(error_of([] { sp::discriminant(Poly{1.0, 1.0, 2.0}); }), ErrorCode::NotMonic);
}

TEST(Discriminant, QuadraticMatchesClosedForm) {
  Gen g(31);
  for (int t = 0; t < 100; ++t) {
    const Complex b = g.complex(3.0), c = g.complex(3.0);
    EXPECT_LE(relative_error(sp::discriminant(Poly{c, b, 1.0}), b * b - 4.0 * c), 1e-12);
  }
}

TEST(Discriminant, VanishesIffRootsRepeat) {
  Gen g(37);
  const sp::NumericConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const std::size_t distinct = static_cast<std::size_t>(g.integer(1, 4));
    auto roots = g.separated_points(distinct, 1.5, 0.5);
    while (roots.size() < 2) roots.push_back(roots.front());
    if (t % 2 == 0 && roots.size() < 5) roots.push_back(roots[static_cast<std::size_t>(g.integer(0, static_cast<int>(distinct) - 1))]);
    const Poly p(sp::testing::expand_roots(roots));
    const auto found = sp::poly_roots(p, cfg);
    const bool repeated = std::any_of(found.begin(), found.end(), [](const sp::Root& r) { return r.multiplicity >= 2; });
    EXPECT_EQ(std::abs(sp::discriminant(p, cfg)) <= cfg.cluster_tol, repeated);
  }
}

TEST(CofactorDeterminant, MatchesLeibniz) {
  Gen g(41);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = g.const_matrix(std::min<std::size_t>(n, 4));
    std::vector<Complex> e;
    for (std::size_t i = 0; i < n * n; ++i) e.push_back(g.complex());
    EXPECT_LE(std::abs(sp::cofactor_determinant(e, n) - sp::testing::leibniz_determinant(e, n)), 1e-12);
    EXPECT_LE(std::abs(sp::lu_determinant(e, n) - sp::testing::leibniz_determinant(e, n)), 1e-12);
  }
}

TEST(CanonicalSort, IndependentOfInputOrder) {
  std::vector<Complex> v{{1.0 + 1e-12, -2.0}, {1.0, 2.0}, {-3.0, 0.0}, {1.0 - 1e-12, 0.5}};
  std::vector<Complex> sorted = v;
  sp::canonical_sort(sorted, 1e-9);
  EXPECT_EQ(sorted[0], Complex(-3.0, 0.0));
  EXPECT_EQ(sorted[1].imag(), -2.0);
  EXPECT_EQ(sorted[2].imag(), 0.5);
  EXPECT_EQ(sorted[3].imag(), 2.0);
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
  do {
    auto w = v;
    sp::canonical_sort(w, 1e-9);
    EXPECT_EQ(w, sorted);
  } while (std::next_permutation(v.begin(), v.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); }));
}

TEST(NumericConfig, Validation) {
  sp::NumericConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eq_tol = 1e-3;
  EXPECT_EQ(error_of([&] { cfg.validate(); }), ErrorCode::InvalidArgument);
  cfg = {};
  cfg.cluster_tol = -1.0;
  EXPECT_EQ(error_of([&] { cfg.validate(); }), ErrorCode::InvalidArgument);
  cfg = {};
  cfg.max_iter = 0;
  EXPECT_EQ(error_of([&] { cfg.validate(); }), ErrorCode::InvalidArgument);
}
