#include "doctest.h"
#include "newform/bessel.hpp"
#include "newform/errors.hpp"

using namespace newform;

namespace {
void full_suite(unsigned n, unsigned p, unsigned k) {
  auto ctx = make_context(n, Field::make(p, k));
  auto psi = make_additive_character(ctx->G->field(), ctx->K);
  for (auto r : ctx->cuspidal_rows()) {
    auto B = bessel_from_character(*ctx, r, psi);
    auto M = bessel_via_model(*ctx, r, psi);
    CHECK(B.values == M.values);
    for (auto& v : check_bessel_properties(*ctx, B)) {
      INFO(v.name << " " << v.witness);
      CHECK(v.pass);
    }
    auto avg = bessel_bop_average(*ctx, B);
    CHECK(avg[ctx->G->identity()] == 1);
    for (gidx b : ctx->G->bop())
      for (gidx g = 0; g < ctx->G->size(); ++g) CHECK(avg[ctx->G->mul(g, b)] == avg[g]);
  }
}
}  // namespace

TEST_CASE("additive character") {
  auto F = Field::make(2, 2);
  auto K = make_computation_field(2, F);
  auto psi = make_additive_character(F, K);
  bool nontrivial = false;
  for (fq_t x = 0; x < F.q(); ++x) {
    for (fq_t y = 0; y < F.q(); ++y) CHECK(psi(F.add(x, y)) == K.mul(psi(x), psi(y)));
    nontrivial |= psi(x) != 1;
  }
  CHECK(nontrivial);
}

TEST_CASE("bessel suite GL2(F2), GL2(F3)") {
  full_suite(2, 2, 1);
  full_suite(2, 3, 1);
}

TEST_CASE("bessel GL2(F2) explicit value") {
  auto ctx = make_context(2, Field::make(2, 1));
  const GLGroup& G = *ctx->G;
  auto psi = make_additive_character(G.field(), ctx->K);
  auto r = ctx->cuspidal_rows()[0];
  auto B = bessel_from_character(*ctx, r, psi);
  FqMatrix c(2);
  c.at(0, 1) = 1;
  c.at(1, 0) = 1;
  c.at(1, 1) = 1;  // order 3
  gidx cg = G.index_of(c);
  FqMatrix u = FqMatrix::identity(2);
  u.at(0, 1) = 1;
  gidx cu = G.mul(cg, G.index_of(u));
  const auto& K = ctx->K;
  CHECK(B.values[cg] == K.mul(K.inv(2), K.sub(ctx->chi(r, cg), ctx->chi(r, cu))));
  CHECK_THROWS_AS(bessel_from_character(*ctx, 0, psi), NotCuspidal);
  CHECK(gelfand_whittaker_finite(*ctx, B, FqMatrix::identity(2)) == 1);
}

TEST_CASE("averaging lemma") {
  for (unsigned n : {2u, 3u}) {
    auto ctx = make_context(n, Field::make(2, 1));
    auto psi = make_additive_character(ctx->G->field(), ctx->K);
    auto cos = unipotent_cosets(*ctx->G);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      auto a = random_whittaker_vector(*ctx, cos, psi, rng);
      CHECK(is_left_equivariant(*ctx, psi, a.values));
      for (gidx g = 0; g < ctx->G->size(); g += (n == 2 ? 1 : 7)) CHECK(averaging_lemma_check(*ctx, psi, a.values, g));
    }
    ValueArray zero(ctx->G->size(), 0);
    CHECK(averaging_lemma_check(*ctx, psi, zero, 0));
  }
}
