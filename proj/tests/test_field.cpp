#include <tuple>
#include "doctest.h"
#include "newform/errors.hpp"
#include "newform/field.hpp"
#include "newform/glgroup.hpp"
#include "newform/matrix.hpp"

using namespace newform;

TEST_CASE("make_field defaults") {
  auto F2 = Field::make(2, 1);
  CHECK(F2.q() == 2);
  CHECK(F2.poly() == std::vector<std::uint32_t>{0, 1});
  auto F3 = Field::make(3, 1);
  CHECK(F3.q() == 3);
  auto F4 = Field::make(2, 2);
  CHECK(F4.poly() == std::vector<std::uint32_t>{1, 1, 1});
  CHECK_THROWS_AS(Field::make(4, 1), NonPrimeCharacteristic);
  CHECK_THROWS_AS(Field::make(2, 2, {1, 0, 1}), ReduciblePolynomial);
}

TEST_CASE("frobenius and field axioms, exhaustive for small q") {
  for (auto [p, k] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {2, 3}, {3, 2}, {3, 4}}) {
    auto F = Field::make(p, k);
    for (fq_t a = 0; a < F.q(); ++a) {
      CHECK(F.pow(a, F.q()) == a);
      if (a) CHECK(F.mul(a, F.inv(a)) == 1);
      CHECK(F.trace(a) < p);
      for (fq_t b = 0; b < F.q(); b += 1 + F.q() / 9) {
        CHECK(F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b)));
        CHECK(F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b)));
        CHECK(F.sub(F.add(a, b), b) == a);
      }
    }
  }
}

TEST_CASE("computation field") {
  auto K = make_computation_field(2, Field::make(2, 1));
  CHECK(K.ell() == 7);
  CHECK(K.order() == 6);
  CHECK(K.zeta() == 3);
  CHECK(gl_order(2, 3) == 48);
  auto K1 = make_computation_field(1, Field::make(2, 1));
  CHECK(K1.ell() == 3);
  for (auto [n, p, k] : std::vector<std::tuple<unsigned, unsigned, unsigned>>{std::tuple{2u, 3u, 1u}, std::tuple{2u, 5u, 1u}, std::tuple{3u, 2u, 1u}, std::tuple{2u, 2u, 2u}}) {
    auto F = Field::make(p, k);
    auto C = make_computation_field(n, F);
    CHECK(C.ell() % C.order() == 1);
    CHECK(C.ell() > gl_order(n, F.q()));
    CHECK(C.order() % p == 0);
    CHECK(C.pow(C.zeta(), C.order()) == 1);
    for (auto r : prime_factors(C.order())) CHECK(C.pow(C.zeta(), C.order() / r) != 1);
  }
}

TEST_CASE("enumerate GL") {
  CHECK(GLGroup(1, Field::make(3, 1)).size() == 2);
  CHECK(GLGroup(2, Field::make(2, 1)).size() == 6);
  GLGroup G(3, Field::make(2, 1));
  CHECK(G.size() == 168);
  for (gidx g = 0; g < G.size(); ++g) {
    CHECK(G.index_of(G.element(g)) == g);
    CHECK(G.mul(g, G.inv(g)) == G.identity());
  }
  CHECK_THROWS_AS(GLGroup(3, Field::make(3, 1), 1000), EnumerationBoundExceeded);
  CHECK(G.unipotent_upper().size() == 8);
  CHECK(G.bop().size() == 2);
  CHECK(G.block_lower_unipotent(1).size() == 4);
  CHECK(G.mirabolic().size() == 24);
}

TEST_CASE("matrix ops") {
  auto F3 = Field::make(3, 1);
  CHECK(mat_inv(F3, FqMatrix::identity(3)) == FqMatrix::identity(3));
  FqMatrix d(2);
  d.at(0, 0) = 2;
  d.at(1, 1) = 2;
  CHECK(mat_det(F3, d) == 1);
  auto F2 = Field::make(2, 1);
  CHECK(mat_trace(F2, companion(F2, {1, 1, 1})) == 1);
  FqMatrix s(2);
  CHECK_THROWS_AS(mat_inv(F3, s), SingularMatrix);
}

TEST_CASE("charpoly over F_l matches det(xI - A)") {
  ModField K(101, 4, 10);
  ModMatrix A(4, 4);
  std::uint64_t seed = 7;
  for (auto& v : A.a) {
    seed = seed * 6364136223846793005ull + 1442695040888963407ull;
    v = (seed >> 33) % 101;
  }
  auto f = mod_charpoly(K, A);
  REQUIRE(f.size() == 5);
  CHECK(f[4] == 1);
  for (std::uint64_t x = 0; x < 101; x += 7) {
    ModMatrix B = A;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) B.at(i, j) = K.sub(i == j ? x : 0, A.at(i, j));
    CHECK(mod_det(K, B) == poly_eval(K, f, x));
  }
  auto N = mod_nullspace(K, A);
  CHECK(N.rows == 4 - mod_rank(K, A));
}
