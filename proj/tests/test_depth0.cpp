#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "newform/depth0.hpp"
#include "newform/errors.hpp"

using namespace newform;

namespace {
std::uint64_t binom(int a, int b) {
  if (b < 0 || a < b) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
  return r;
}
}  // namespace

TEST_CASE("mackey sums and oldforms") {
  for (auto [n, p] : {std::pair{2u, 2u}, std::pair{2u, 3u}, std::pair{3u, 2u}}) {
    auto ctx = make_context(n, Field::make(p, 1));
    for (auto r : ctx->cuspidal_rows()) {
      CHECK(conductor_depth_zero(*ctx, r) == static_cast<int>(n));
      for (int m = static_cast<int>(n); m <= static_cast<int>(n) + 2; ++m) {
        auto rep = mackey_dimension(*ctx, r, m);
        CHECK(rep.total == binom(m - 1, static_cast<int>(n) - 1));
        CHECK(rep.d_count == rep.total);
        CHECK(rep.c_certified > 0);
        CHECK(rep.a2_certified > 0);
      }
    }
  }
}

namespace {
std::shared_ptr<const DepthZeroRep> rep_for(unsigned n, unsigned p, std::uint64_t omega = 1, std::uint64_t shuffle = 0) {
  static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const GroupContext>> cache;
  auto& c = cache[{n, p}];
  if (!c) c = make_context(n, Field::make(p, 1));
  return DepthZeroRep::make(c, c->cuspidal_rows()[0], omega, 1, shuffle);
}
}  // namespace

TEST_CASE("newform evaluation") {
  for (auto [n, p] : {std::pair{2u, 2u}, std::pair{2u, 3u}, std::pair{3u, 2u}}) {
    auto rep = rep_for(n, p);
    const auto& R = rep->ring();
    auto atS = rep->newform_eval(rep->Sigma());
    CHECK(atS == rep->bop_average());
    CHECK(atS[rep->G().identity()] == 1);
    CHECK(rep->newform_integral_eval(rep->Sigma()) == atS);
    if (n == 2) {
      auto z = rep->newform_eval(WindowMatrix::identity(R, n));
      CHECK(std::all_of(z.begin(), z.end(), [](auto v) { return v == 0; }));
    }
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
      auto g = rep->random_support_point(rng);
      auto v = rep->newform_eval(g);
      CHECK(v == rep->newform_integral_eval(g));
      CHECK(rep->newform_eval(g * rep->random_Kn(rng)) == v);
      auto k = rep->random_K(rng);
      auto vk = rep->newform_eval(k * g);
      const auto kb = rep->G().index_of(k.reduce());
      for (gidx x = 0; x < rep->G().size(); ++x) CHECK(vk[x] == v[rep->G().mul(x, kb)]);
    }
  }
}

TEST_CASE("matrix coefficients") {
  for (auto [n, p] : {std::pair{2u, 3u}, std::pair{3u, 2u}}) {
    auto rep = rep_for(n, p);
    const auto& R = rep->ring();
    auto one = WindowMatrix::identity(R, n);
    CHECK(rep->matrix_coeff_direct(one) != 0);
    CHECK(rep->single_coset_coefficient() == rep->coefficient_constant());
    if (n == 2 && p == 3) CHECK(rep->coefficient_constant() == 8);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
      auto g = rep->random_sigma_conj(rng);
      const auto c = rep->matrix_coeff_direct(g);
      CHECK(c == rep->matrix_coeff_formula(g));
      CHECK(rep->matrix_coeff_direct(rep->random_Kn(rng) * g * rep->random_Kn(rng)) == c);
    }
  }
}

TEST_CASE("whittaker newform") {
  for (auto [n, p] : {std::pair{2u, 2u}, std::pair{2u, 3u}}) {
    auto rep = rep_for(n, p);
    const auto& R = rep->ring();
    auto one = WindowMatrix::identity(R, n);
    CHECK(rep->whittaker_newform(one) == 1);
    CHECK(rep->whittaker_newform_k(one) == 1);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
      auto g = rep->random_whittaker_support(rng);
      CHECK(rep->in_whittaker_support(g));
      CHECK(rep->whittaker_newform(g) == rep->whittaker_newform_k(g));
    }
    for (int a = -2; a <= 2; ++a) {
      auto t = WindowMatrix::diag_powers(R, {a, 0});
      const auto w = rep->whittaker_newform_k(t);
      CHECK((a == 0) == (w != 0));
    }
  }
}
