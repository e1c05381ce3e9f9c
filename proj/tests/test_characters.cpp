#include <algorithm>
#include <random>

#include "doctest.h"
#include "newform/characters.hpp"
#include "newform/errors.hpp"

using namespace newform;

TEST_CASE("conjugacy classes") {
  {
    GLGroup G(1, Field::make(3, 1));
    auto C = conjugacy_classes(G);
    CHECK(C.count() == 2);
  }
  {
    GLGroup G(2, Field::make(2, 1));
    auto C = conjugacy_classes(G);
    CHECK(C.count() == 3);
    auto sizes = C.sizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::uint64_t>{1, 2, 3});
  }
  GLGroup G(2, Field::make(3, 1));
  auto C = conjugacy_classes(G);
  CHECK(C.count() == 8);
  std::uint64_t total = 0;
  for (auto s : C.sizes) total += s;
  CHECK(total == 48);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    gidx g = rng() % G.size(), x = rng() % G.size();
    CHECK(C.class_of[G.conj(g, x)] == C.class_of[x]);
  }
  for (std::size_t c = 0; c < C.count(); ++c) CHECK(C.class_of[C.reps[c]] == c);
}

TEST_CASE("dixon tables") {
  {
    auto ctx = make_context(1, Field::make(3, 1));
    CHECK(ctx->table.rows() == 2);
    CHECK(ctx->table.degree == std::vector<std::uint64_t>{1, 1});
  }
  {
    auto ctx = make_context(2, Field::make(2, 1));
    CHECK(ctx->table.degree == std::vector<std::uint64_t>{1, 1, 2});
    CHECK(ctx->cuspidal_rows().size() == 1);
    CHECK(ctx->table.degree[ctx->cuspidal_rows()[0]] == 1);
    CHECK_FALSE(ctx->table.cuspidal[0]);  // trivial row sorts first
  }
  auto ctx = make_context(2, Field::make(3, 1));
  std::uint64_t s = 0;
  for (auto d : ctx->table.degree) s += d * d;
  CHECK(s == 48);
  auto cusp = ctx->cuspidal_rows();
  CHECK(cusp.size() == 3);
  for (auto r : cusp) CHECK(ctx->table.degree[r] == 2);
  check_orthogonality(*ctx->G, ctx->classes, ctx->table);
}

TEST_CASE("gl2 oracle matches dixon cuspidal rows") {
  for (unsigned p : {2u, 3u, 5u}) {
    auto ctx = make_context(2, Field::make(p, 1));
    auto cusp = ctx->cuspidal_rows();
    auto orbits = regular_theta_orbits(p);
    CHECK(orbits.size() == p * (p - 1) / 2);
    CHECK(cusp.size() == orbits.size());
    std::vector<std::size_t> matched;
    for (auto j : orbits) {
      auto f = gl2_cuspidal_oracle(*ctx, j);
      CHECK(f[ctx->classes.identity_class] == p - 1);
      auto it = std::find(ctx->table.values.begin(), ctx->table.values.end(), f);
      REQUIRE(it != ctx->table.values.end());
      matched.push_back(static_cast<std::size_t>(it - ctx->table.values.begin()));
    }
    std::sort(matched.begin(), matched.end());
    CHECK(matched == cusp);
    CHECK_THROWS_AS(gl2_cuspidal_oracle(*ctx, 0), NonRegularTheta);
  }
}

TEST_CASE("invariant dimensions and central characters") {
  auto ctx = make_context(2, Field::make(3, 1));
  const GLGroup& G = *ctx->G;
  for (std::size_t r = 0; r < ctx->table.rows(); ++r) {
    CHECK(invariant_dim(*ctx, r, {G.identity()}) == ctx->table.degree[r]);
    auto w = central_character(*ctx, r);
    CHECK(w[0] == 1);
    CHECK(ctx->K.mul(w[1], w[1]) == 1);
  }
  for (auto r : ctx->cuspidal_rows()) {
    CHECK(invariant_dim(*ctx, r, G.unipotent_upper()) == 0);
    CHECK(invariant_dim(*ctx, r, G.bop()) == 1);
    CHECK(invariant_dim(*ctx, r, G.block_lower_unipotent(1)) == 0);
  }
  std::vector<gidx> bad{G.identity(), G.unipotent_upper().back()};
  bad.push_back(G.scalar(2));
  CHECK_THROWS_AS(invariant_dim(*ctx, 0, bad), NotAGroup);

  auto ctx2 = make_context(2, Field::make(2, 1));
  auto c = ctx2->cuspidal_rows()[0];
  CHECK(invariant_dim(*ctx2, c, ctx2->G->unipotent_upper()) == 0);
  CHECK_FALSE(is_cuspidal(*ctx2->G, ctx2->classes, ctx2->table.values[0], ctx2->K));
}

TEST_CASE("GL3(F2) and GL2(F4) tables") {
  auto ctx = make_context(3, Field::make(2, 1));
  CHECK(ctx->table.rows() == 6);
  CHECK(ctx->cuspidal_rows().size() == 2);
  auto ctx4 = make_context(2, Field::make(2, 2));
  CHECK(ctx4->cuspidal_rows().size() == 6);
  for (auto r : ctx4->cuspidal_rows()) CHECK(ctx4->table.degree[r] == 3);
}
