#include <random>

#include "doctest.h"
#include "newform/errors.hpp"
#include "newform/local.hpp"

using namespace newform;

namespace {
Scalar rand_scalar(const LocalRing& R, std::mt19937_64& rng, int lo, int len) {
  std::vector<fq_t> d(len);
  for (auto& x : d) x = static_cast<fq_t>(rng() % R.residue().q());
  return Scalar::from_digits(R, lo, d);
}
}  // namespace

TEST_CASE("scalar field laws, equal characteristic") {
  auto F = Field::make(3, 1);
  LocalRing R(F, LocalRing::Mode::Equal, 4, 12);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    auto a = rand_scalar(R, rng, -2, 5), b = rand_scalar(R, rng, 0, 6), c = rand_scalar(R, rng, 1, 3);
    CHECK((a + b).same(b + a));
    CHECK(((a + b) * c).same(a * c + b * c));
    CHECK((a - a).known_zero());
    if (!b.known_zero() && b.val() <= R.B()) CHECK((b * b.inv()).same(Scalar::one(R)));
  }
  auto x = Scalar::monomial(R, 1, -3);
  CHECK(x.val() == -3);
  CHECK_THROWS_AS(x * x, WindowOverflow);
}

TEST_CASE("scalar arithmetic, mixed characteristic") {
  auto F = Field::make(5, 1);
  LocalRing R(F, LocalRing::Mode::Mixed, 3, 12);
  auto two = Scalar::from_int(R, 2), three = Scalar::from_int(R, 3);
  CHECK((two + three).same(Scalar::from_int(R, 5)));
  CHECK((two + three).val() == 1);
  CHECK((two * three).same(Scalar::from_int(R, 6)));
  CHECK((-two).same(Scalar::from_int(R, -2)));
  CHECK((two * two.inv()).same(Scalar::one(R)));
  auto inv5 = Scalar::from_int(R, 5).inv();
  CHECK(inv5.val() == -1);
  CHECK((inv5 * Scalar::from_int(R, 10)).same(two));
}

TEST_CASE("window matrices") {
  auto F = Field::make(2, 1);
  LocalRing R(F, LocalRing::Mode::Equal, 6, 20);
  std::mt19937_64 rng(3);
  int tested = 0;
  for (int t = 0; t < 50; ++t) {
    WindowMatrix A(R, 3);
    for (unsigned i = 0; i < 3; ++i)
      for (unsigned j = 0; j < 3; ++j) A.at(i, j) = rand_scalar(R, rng, 0, 3);
    try {
      auto Ai = A.inverse();
      auto P = A * Ai;
      for (unsigned i = 0; i < 3; ++i)
        for (unsigned j = 0; j < 3; ++j) CHECK(P.at(i, j).same(i == j ? Scalar::one(R) : Scalar(R)));
      ++tested;
    } catch (const SingularMatrix&) {
    } catch (const WindowOverflow&) {
    }
  }
  CHECK(tested > 10);
  auto D = WindowMatrix::diag_powers(R, {2, 0, -1});
  CHECK(D.det_val() == 1);
  CHECK(!D.is_integral());
  CHECK(D.is_monomial());
  CHECK(WindowMatrix::identity(R, 3).in_K());
}

TEST_CASE("residue ring") {
  for (auto mode : {LocalRing::Mode::Equal, LocalRing::Mode::Mixed}) {
    ResidueRing A(Field::make(3, 1), mode, 3);
    CHECK(A.size() == 27);
    for (std::uint64_t a = 0; a < 27; ++a) {
      CHECK(A.add(a, A.neg(a)) == 0);
      if (A.is_unit(a)) CHECK(A.mul(a, A.inv(a)) == 1);
    }
    CHECK(A.val(9) == 2);
  }
  ResidueRing E(Field::make(2, 2), LocalRing::Mode::Equal, 2);
  for (std::uint64_t a = 0; a < E.size(); ++a)
    if (E.is_unit(a)) CHECK(E.mul(a, E.inv(a)) == 1);
}

#include "newform/pattern.hpp"

TEST_CASE("conductor subgroup and sigma conjugation") {
  auto F = Field::make(3, 1);
  auto R = LocalRing::default_window(F, 2, 2);
  auto K22 = conductor_subgroup(2, 2);
  CHECK(K22.bound == std::vector<int>{0, 0, 2, 0});
  WindowMatrix x = WindowMatrix::identity(R, 2);
  x.at(1, 0) = Scalar::monomial(R, 1, 2);
  CHECK(K22.contains(x));
  x.at(1, 0) = Scalar::monomial(R, 1, 1);
  CHECK(!K22.contains(x));
  auto C = conjugate_pattern(K22, sigma(R, 2));
  CHECK(C.bound == std::vector<int>{0, 1, 1, 0});
  CHECK(C.c(1) == 2);
  CHECK(conjugate_pattern(K22, WindowMatrix::identity(R, 2)) == K22);
  CHECK(conjugate_pattern(C, sigma(R, 2).inverse()) == K22);
  CHECK(sigma_mn(R, 0, 2).reduce() == sigma(R, 2).reduce());
  auto S12 = sigma_mn(R, 1, 2);
  CHECK(S12.at(0, 0).val() == 2);
  // Sigma_{1,3}-conjugate of K_3(6) at n = 2, m = 1
  auto R2 = LocalRing::default_window(F, 2, 1);
  auto P = conjugate_pattern(conductor_subgroup(2, 4), sigma_mn(R2, 1, 2));
  CHECK(P.bound == std::vector<int>{0, 2, 2, 0});
  WindowMatrix mono(R, 2);
  mono.at(0, 0) = Scalar::one(R);
  mono.at(0, 1) = Scalar::one(R);
  mono.at(1, 1) = Scalar::one(R);
  CHECK_THROWS_AS(conjugate_pattern(K22, mono), NotMonomial);
}

TEST_CASE("pattern index and transversal") {
  for (unsigned q : {2u, 3u}) {
    auto F = Field::make(q, 1);
    auto R = LocalRing::default_window(F, 3, 3);
    // Sigma K Sigma^{-1} direction
    for (unsigned n : {2u, 3u}) {
      auto Km = conductor_subgroup(n, static_cast<int>(n));
      auto Q = pattern_intersect(Km, conjugate_pattern(full_K(n), sigma(R, n)));
      const auto idx = pattern_index(F, Km, Q);
      CHECK(idx == (n == 2 ? q : q * q * q * (q + 1)));
      CHECK(pattern_transversal(R, Km, Q).size() == idx);
    }
    CHECK(pattern_index(F, full_K(2), full_K(2)) == 1);
    CHECK(support_transversal(R, 2, 2).size() == 1);
    CHECK(support_transversal(R, 3, 3).size() == q + 1);
  }
}

TEST_CASE("support membership") {
  auto F = Field::make(2, 1);
  for (unsigned n : {2u, 3u}) {
    const int m = static_cast<int>(n);
    auto R = LocalRing::default_window(F, n, m);
    auto T = support_transversal(R, n, m);
    auto S = sigma(R, n);
    auto w = support_membership(S, m, T);
    REQUIRE(w.has_value());
    CHECK(w->v == 0);
    CHECK(w->y == 0);
    std::mt19937_64 rng(11);
    auto Km = conductor_subgroup(n, m);
    for (int t = 0; t < 30; ++t) {
      auto k = random_pattern_element(R, full_K(n), rng, 2);
      auto y = random_pattern_element(R, Km, rng, 2);
      const int v = static_cast<int>(rng() % 3) - 1;
      auto g = (k * S * y).shift(v);
      auto r = support_membership(g, m, T);
      REQUIRE(r.has_value());
      CHECK(r->v == v);
      // wrong determinant valuation
      std::vector<int> e(n, 0);
      e[0] = static_cast<int>(n * (n - 1) / 2) + 1 + t % static_cast<int>(n - 1);
      auto bad = random_pattern_element(R, full_K(n), rng, 2) * WindowMatrix::diag_powers(R, e);
      CHECK(!support_membership(bad, m, T).has_value());
    }
  }
  auto R = LocalRing::default_window(F, 2, 2);
  CHECK(!support_membership(WindowMatrix::identity(R, 2), 2, support_transversal(R, 2, 2)).has_value());
}

TEST_CASE("family enumeration and counts") {
  auto F = Field::make(3, 1);
  auto R = LocalRing::default_window(F, 3, 3);
  std::size_t c = 0;
  enumerate_family(Family::A1, R, 2, 1, 0, [&](const CosetRep&) { ++c; });
  CHECK(c == 6);
  CHECK(family_count(Family::A1, 3, 2, 1, 0) == 6);
  for (unsigned n : {2u, 3u})
    for (int m = 1; m <= 6; ++m) {
      std::size_t d = 0;
      enumerate_family(Family::D, R, n, m, 0, [&](const CosetRep& r) {
        ++d;
        CHECK(r.mat.is_monomial());
      });
      const std::size_t binom = n == 2 ? static_cast<std::size_t>(m - 1) : static_cast<std::size_t>((m - 1) * (m - 2) / 2);
      CHECK(d == binom);
    }
  std::vector<CosetRep> d3;
  enumerate_family(Family::D, R, 3, 3, 0, [&](const CosetRep& r) { d3.push_back(r); });
  REQUIRE(d3.size() == 1);
  CHECK(d3[0].mat.at(0, 0).val() == 2);
  CHECK(d3[0].mat.at(1, 1).val() == 1);
  for (auto tag : {Family::A2, Family::B, Family::C}) {
    std::size_t k = 0;
    enumerate_family(tag, R, 3, 2, 2, [&](const CosetRep& r) {
      ++k;
      if (tag == Family::C)
        for (std::size_t i = 0; i < r.alpha.size(); ++i) {
          const auto& v = r.mat.at(2, 1 - i);
          CHECK((v.known_zero() || v.val() < r.alpha[i]));
        }
    });
    CHECK(k == family_count(tag, 3, 3, 2, 2));
  }
  CHECK_THROWS_AS(family_from_string("E"), UnknownFamily);
}

TEST_CASE("coset partition") {
  auto rep = verify_coset_partition(Field::make(2, 1), LocalRing::Mode::Equal, 2, 1);
  CHECK(rep.orbit == 3);
  CHECK(rep.a1 == 2);
  CHECK(rep.a2 == 1);
  CHECK(verify_coset_partition(Field::make(3, 1), LocalRing::Mode::Equal, 2, 2).orbit == 72);
  CHECK(verify_coset_partition(Field::make(2, 1), LocalRing::Mode::Equal, 3, 1).orbit == 7);
  CHECK(verify_coset_partition(Field::make(2, 2), LocalRing::Mode::Equal, 3, 2).pass);
  CHECK(verify_coset_partition(Field::make(3, 1), LocalRing::Mode::Mixed, 3, 2).pass);
}

TEST_CASE("reduction images") {
  auto F = Field::make(3, 1);
  GLGroup G(2, F);
  auto R = LocalRing::default_window(F, 2, 2);
  CosetRep s2{Family::D, {1}, 0, {}, sigma(R, 2)};
  auto img = reduction_image(G, R, s2, 2);
  CHECK(img.exact);
  CHECK(img.elements.size() == 2);  // diag(a, 1)
  GLGroup G3(3, Field::make(2, 1));
  auto R3 = LocalRing::default_window(G3.field(), 3, 3);
  // alpha_{n-1} >= m forces N_{1,n-1}
  auto big = diagonal_image(G3, {1, 3}, 3);
  auto N = G3.block_lower_unipotent(1);
  CHECK(std::includes(big.begin(), big.end(), N.begin(), N.end()));
  std::size_t checked = 0;
  enumerate_family(Family::C, R3, 3, 3, 3, [&](const CosetRep& r) {
    auto im = reduction_image(G3, R3, r, 3);
    CHECK(im.block >= 1);
    checked += im.witnesses;
  });
  CHECK(checked > 0);
  enumerate_family(Family::A2, R3, 3, 3, 0, [&](const CosetRep& a) {
    for (const auto& al : alpha_chains(3, 3, false, false)) {
      auto im = reduction_image(G3, R3, a2_times_b(R3, a, al), 3);
      CHECK(im.block == 2);
    }
  });
}
