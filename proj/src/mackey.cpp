#include <algorithm>
#include <map>

#include "newform/depth0.hpp"
#include "newform/errors.hpp"

namespace newform {

namespace {

std::string alpha_str(const std::vector<int>& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
  return s + ")";
}

bool is_strict_below(const std::vector<int>& a, int m) {
  int prev = 0;
  for (int x : a) {
    if (x <= prev || x >= m) return false;
    prev = x;
  }
  return true;
}

// indices certified in a block: everything when small, else ends plus seeded samples
std::vector<std::uint64_t> block_indices(std::uint64_t count, const MackeyOptions& opt, std::mt19937_64& rng) {
  std::vector<std::uint64_t> idx;
  if (count <= opt.block_budget) {
    for (std::uint64_t i = 0; i < count; ++i) idx.push_back(i);
    return idx;
  }
  idx.push_back(0);
  idx.push_back(count - 1);
  for (std::uint64_t s = 0; s < opt.samples; ++s) idx.push_back(rng() % count);
  return idx;
}

}  // namespace

MackeyReport mackey_dimension(const GroupContext& ctx, std::size_t row, int m, const MackeyOptions& opt) {
  if (m < 0) throw InvalidArgument("level must be nonnegative");
  const GLGroup& G = *ctx.G;
  const unsigned n = G.n();
  const std::uint32_t q = G.field().q();
  const LocalRing R = LocalRing::default_window(G.field(), n, std::max(m, 1));
  MackeyReport rep;
  rep.m = m;

  // radicals of proper parabolics carry no invariants
  std::map<unsigned, std::uint64_t> radical_dim;
  for (unsigned n1 = 1; n1 < n; ++n1) radical_dim[n1] = invariant_dim(ctx, row, G.block_lower_unipotent(n1));

  const auto N1 = G.block_lower_unipotent(1);
  for (const auto& a : alpha_chains(n, m + 1, false, false)) {
    const auto img = diagonal_image(G, a, m);
    const std::uint64_t d = invariant_dim(ctx, row, img);
    rep.diagonal.emplace_back(a, d);
    rep.total += d;
    const bool strict = is_strict_below(a, m);
    if (strict) ++rep.d_count;
    if (a.back() >= m) {
      if (!std::includes(img.begin(), img.end(), N1.begin(), N1.end()))
        throw VerificationFailure("diagonal " + alpha_str(a) + " image misses N_{1,n-1}");
      ++rep.diagonal_symbolic;
    }
    if (d != (strict ? 1u : 0u))
      throw VerificationFailure("diagonal " + alpha_str(a) + " contributes " + std::to_string(d));
  }
  if (m == 0) return rep;

  std::mt19937_64 rng(opt.seed);
  auto certify = [&](const CosetRep& g, std::uint64_t& counter) {
    const auto im = reduction_image(G, R, g, m);
    if (radical_dim.at(im.block) != 0)
      throw VerificationFailure("certified radical has invariants for " + g.csv());
    ++counter;
  };
  for (const auto& a : alpha_chains(n, m + 1, false, false)) {
    const std::uint64_t cnt = c_block_count(q, a);
    rep.c_members += cnt;
    for (auto i : block_indices(cnt, opt, rng)) certify(c_block_member(R, a, i), rep.c_certified);
    for (unsigned j = 1; j < n; ++j) {
      const std::uint64_t acnt = a2_count(q, n, m, j);
      rep.a2_members += acnt;
      for (auto i : block_indices(acnt, opt, rng)) certify(a2_times_b(R, a2_member(R, n, m, j, i), a), rep.a2_certified);
    }
  }
  return rep;
}

std::uint64_t mackey_contribution(const GroupContext& ctx, std::size_t row, const LocalRing& R, const CosetRep& g,
                                  int m) {
  const GLGroup& G = *ctx.G;
  const auto im = reduction_image(G, R, g, m);
  if (im.exact) return invariant_dim(ctx, row, im.elements);
  if (invariant_dim(ctx, row, G.block_lower_unipotent(im.block)) != 0)
    throw VerificationFailure("certified subgroup has invariants; contribution undetermined");
  return 0;
}

std::uint64_t oldform_dimension(const GroupContext& ctx, std::size_t row, int m, const MackeyOptions& opt) {
  return mackey_dimension(ctx, row, m, opt).total;
}

int conductor_depth_zero(const GroupContext& ctx, std::size_t row, const MackeyOptions& opt) {
  const int n = static_cast<int>(ctx.G->n());
  for (int m = 0; m <= n; ++m) {
    const auto t = mackey_dimension(ctx, row, m, opt).total;
    if (t != (m == n ? 1u : 0u))
      throw VerificationFailure("level " + std::to_string(m) + " has invariant dimension " + std::to_string(t));
  }
  return n;
}

}  // namespace newform
