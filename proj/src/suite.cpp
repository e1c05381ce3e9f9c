#include "newform/suite.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>
#include <sstream>

#include "newform/cache.hpp"
#include "newform/depth0.hpp"
#include "newform/errors.hpp"
#include "newform/minimax.hpp"
#include "newform/pattern.hpp"

namespace newform {

using nlohmann::json;

Field field_for(std::uint32_t q) {
  for (std::uint32_t p = 2; p <= q; ++p) {
    if (!is_prime(p)) continue;
    unsigned k = 0;
    std::uint64_t t = 1;
    while (t < q) t *= p, ++k;
    if (t == q) return Field::make(p, k);
  }
  throw InvalidArgument("q is not a prime power");
}

namespace {

std::uint64_t binom(int a, int b) {
  if (b < 0 || a < b) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
  return r;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct Env {
  const SuiteOptions& opt;
  bool quick() const { return opt.profile == "quick"; }
  std::map<std::pair<unsigned, std::uint32_t>, std::shared_ptr<const GroupContext>> ctx;

  std::shared_ptr<const GroupContext> context(unsigned n, std::uint32_t q) {
    auto& c = ctx[{n, q}];
    if (!c) c = cached_context(n, field_for(q), 0, opt.use_cache);
    return c;
  }
};

std::string label(unsigned n, std::uint32_t q) {
  return "(" + std::to_string(n) + "," + std::to_string(q) + ")";
}

const std::vector<std::pair<unsigned, std::uint32_t>> kConductorScope{{2, 2}, {2, 3}, {2, 5}, {3, 2}};

CriterionResult criterion_conductor(Env& env) {
  CriterionResult r{1, "conductor and Mackey vanishing below n", true, "", json::object(), 0};
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t rows = 0;
  for (auto [n, q] : kConductorScope) {
    auto ctx = env.context(n, q);
    json per = json::array();
    for (auto row : ctx->cuspidal_rows()) {
      std::vector<std::uint64_t> totals;
      for (int m = 0; m <= static_cast<int>(n); ++m) totals.push_back(mackey_dimension(*ctx, row, m).total);
      const int c = conductor_depth_zero(*ctx, row);
      bool ok = c == static_cast<int>(n) && totals.back() == 1;
      for (int m = 0; m < static_cast<int>(n); ++m) ok = ok && totals[static_cast<std::size_t>(m)] == 0;
      r.pass = r.pass && ok;
      per.push_back({{"row", row}, {"conductor", c}, {"mackey", totals}, {"pass", ok}});
      ++rows;
    }
    r.payload[label(n, q)] = per;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = r.pass && secs < 300;
  r.summary = std::to_string(rows) + " cuspidal rows, c(pi) = n, sums 0 below n and 1 at n";
  return r;
}

CriterionResult criterion_oldforms(Env& env) {
  CriterionResult r{2, "oldform dimensions binom(m-1, n-1)", true, "", json::object(), 0};
  std::size_t checks = 0;
  for (auto [n, q] : kConductorScope) {
    auto ctx = env.context(n, q);
    json per = json::array();
    for (auto row : ctx->cuspidal_rows()) {
      std::vector<std::uint64_t> dims;
      bool ok = true;
      for (int m = static_cast<int>(n); m <= static_cast<int>(n) + 4; ++m) {
        dims.push_back(oldform_dimension(*ctx, row, m));
        ok = ok && dims.back() == binom(m - 1, static_cast<int>(n) - 1);
        ++checks;
      }
      r.pass = r.pass && ok;
      per.push_back({{"row", row}, {"dims", dims}, {"pass", ok}});
    }
    r.payload[label(n, q)] = per;
  }
  r.summary = std::to_string(checks) + " dimensions for n <= m <= n+4";
  return r;
}

CriterionResult criterion_bessel(Env& env) {
  CriterionResult r{3, "Bessel properties and model agreement", true, "", json::object(), 0};
  std::size_t rows = 0;
  for (auto [n, q] : std::vector<std::pair<unsigned, std::uint32_t>>{{2, 2}, {2, 3}, {2, 4}, {3, 2}}) {
    auto ctx = env.context(n, q);
    const auto psi = make_additive_character(ctx->G->field(), ctx->K);
    json per = json::array();
    for (auto row : ctx->cuspidal_rows()) {
      const BesselTable B = bessel_from_character(*ctx, row, psi);
      const BesselTable M = bessel_via_model(*ctx, row, psi);
      json props = json::object();
      bool ok = B.values == M.values;
      for (const auto& v : check_bessel_properties(*ctx, B)) {
        props[v.name] = v.pass;
        ok = ok && v.pass;
      }
      r.pass = r.pass && ok;
      per.push_back({{"row", row}, {"properties", props}, {"model_agrees", B.values == M.values}});
      ++rows;
    }
    r.payload[label(n, q)] = per;
  }
  r.summary = std::to_string(rows) + " cuspidal rows, B1-B4 exhaustive, from_character = via_model";
  return r;
}

// g with entries sum_{e in [lo, hi)} d_e pi^e, in radix order
std::vector<WindowMatrix> window_matrices(const LocalRing& R, unsigned n, int lo, int hi) {
  const std::uint32_t q = R.residue().q();
  const int L = hi - lo;
  const std::uint64_t per = ipow(q, static_cast<unsigned>(L));
  const std::uint64_t total = ipow(per, n * n);
  std::vector<WindowMatrix> out;
  for (std::uint64_t code = 0; code < total; ++code) {
    WindowMatrix g(R, n);
    std::uint64_t t = code;
    for (unsigned e = 0; e < n * n; ++e, t /= per) {
      std::uint64_t v = t % per;
      std::vector<fq_t> d(static_cast<std::size_t>(L));
      for (auto& x : d) x = static_cast<fq_t>(v % q), v /= q;
      g.at(e / n, e % n) = Scalar::from_digits(R, lo, d);
    }
    try {
      if (g.det().known_zero()) continue;
    } catch (const WindowOverflow&) {
      continue;  // det vanishes far past the digits in play, so g is singular
    }
    out.push_back(g);
  }
  return out;
}

WindowMatrix generic_point(const DepthZeroRep& rep, std::mt19937_64& rng, int spread) {
  std::vector<int> a(rep.n());
  for (auto& v : a) v = static_cast<int>(rng() % static_cast<std::uint64_t>(2 * spread + 1)) - spread;
  return rep.random_unipotent(rng, spread) * WindowMatrix::diag_powers(rep.ring(), a) * rep.random_K(rng);
}

CriterionResult criterion_eval(Env& env) {
  CriterionResult r{4, "newform_eval = newform_integral_eval", true, "", json::object(), 0};
  auto scaled = [](const ModField& K, std::uint64_t c, ValueArray v) {
    for (auto& x : v) x = K.mul(c, x);
    return v;
  };
  std::size_t total = 0;
  // exhaustive window at (2,2)
  {
    auto ctx = env.context(2, 2);
    auto rep = DepthZeroRep::make(ctx, ctx->cuspidal_rows()[0]);
    const ModField& K = rep->K();
    const gidx e = rep->G().identity();
    const std::uint64_t lambda =
        K.mul(rep->newform_eval(rep->Sigma())[e], K.inv(rep->newform_integral_eval(rep->Sigma())[e]));
    const int lo = -1, hi = env.quick() ? 1 : 2;
    std::size_t points = 0, support = 0, bad = 0;
    for (const auto& g : window_matrices(rep->ring(), 2, lo, hi)) {
      const ValueArray v = rep->newform_eval(g);
      if (std::any_of(v.begin(), v.end(), [](auto x) { return x != 0; })) ++support;
      if (v != scaled(K, lambda, rep->newform_integral_eval(g))) ++bad;
      ++points;
    }
    total += points;
    r.pass = r.pass && bad == 0 && support > 0;
    r.payload["(2,2)"] = {{"window", {lo, hi}}, {"points", points}, {"support_points", support}, {"mismatches", bad},
                          {"normalization", lambda}};
  }
  for (auto [n, q] : std::vector<std::pair<unsigned, std::uint32_t>>{{2, 3}, {3, 2}}) {
    auto ctx = env.context(n, q);
    auto rep = DepthZeroRep::make(ctx, ctx->cuspidal_rows()[0]);
    const ModField& K = rep->K();
    const gidx e = rep->G().identity();
    const std::uint64_t lambda =
        K.mul(rep->newform_eval(rep->Sigma())[e], K.inv(rep->newform_integral_eval(rep->Sigma())[e]));
    std::mt19937_64 rng(mix(env.opt.seed, 40 + n * 10 + q));
    const int samples = env.quick() ? 20 : 100;
    std::size_t support = 0, bad = 0;
    std::uint64_t digest = 0;
    for (int i = 0; i < samples; ++i) {
      const WindowMatrix g = i % 2 == 0 ? rep->random_support_point(rng) : generic_point(*rep, rng, 2);
      const ValueArray v = rep->newform_eval(g);
      if (std::any_of(v.begin(), v.end(), [](auto x) { return x != 0; })) ++support;
      if (v != scaled(K, lambda, rep->newform_integral_eval(g))) ++bad;
      for (auto x : v) digest = digest * 1000003 + x;
    }
    total += static_cast<std::size_t>(samples);
    r.pass = r.pass && bad == 0 && support > 0;
    r.payload[label(n, q)] = {{"samples", samples}, {"support_points", support}, {"mismatches", bad},
                              {"normalization", lambda}, {"value_digest", digest}};
  }
  r.summary = std::to_string(total) + " points compared after normalizing at Sigma";
  return r;
}

CriterionResult criterion_coefficients(Env& env) {
  CriterionResult r{5, "matrix coefficients: formula = direct, constant, bi-K(n) invariance", true, "",
                    json::object(), 0};
  const int samples = env.quick() ? 10 : 50;
  for (auto [n, q] : std::vector<std::pair<unsigned, std::uint32_t>>{{2, 3}, {3, 2}}) {
    auto ctx = env.context(n, q);
    const std::size_t row = ctx->cuspidal_rows()[0];
    auto rep = DepthZeroRep::make(ctx, row);
    const ModField& K = rep->K();
    const std::uint64_t U = ipow(q, n * (n - 1) / 2);
    const std::uint64_t expect =
        K.mul(K.from_int(static_cast<std::int64_t>(rep->G().size())),
              K.inv(K.mul(K.from_int(static_cast<std::int64_t>(U)), K.from_int(static_cast<std::int64_t>(ctx->table.degree[row])))));
    const std::uint64_t c = rep->coefficient_constant();
    const std::uint64_t c1 = rep->single_coset_coefficient();
    bool ok = c == expect && c1 == c;
    if (n == 2 && q == 3) ok = ok && c == 8;
    std::mt19937_64 rng(mix(env.opt.seed, 50 + n * 10 + q));
    std::size_t bad_formula = 0, bad_invariance = 0, nonzero = 0;
    for (int i = 0; i < samples; ++i) {
      const WindowMatrix g = rep->random_sigma_conj(rng);
      const std::uint64_t d = rep->matrix_coeff_direct(g);
      if (d != rep->matrix_coeff_formula(g)) ++bad_formula;
      if (d) ++nonzero;
    }
    for (int i = 0; i < samples; ++i) {
      const WindowMatrix g = rep->random_sigma_conj(rng);
      const std::uint64_t d = rep->matrix_coeff_direct(g);
      if (rep->matrix_coeff_direct(rep->random_Kn(rng) * g * rep->random_Kn(rng)) != d) ++bad_invariance;
    }
    ok = ok && bad_formula == 0 && bad_invariance == 0 && nonzero > 0;
    r.pass = r.pass && ok;
    r.payload[label(n, q)] = {{"constant", c},         {"expected_constant", expect}, {"single_coset", c1},
                              {"samples", samples},    {"formula_mismatches", bad_formula},
                              {"nonzero", nonzero},    {"invariance_failures", bad_invariance}};
  }
  r.summary = "formula vs direct and bi-K(n) pairs at (2,3), (3,2); constant 8 at (2,3)";
  return r;
}

CriterionResult criterion_whittaker(Env& env) {
  CriterionResult r{6, "Whittaker newform", true, "", json::object(), 0};
  const int support_n = env.quick() ? 5 : 20, off_n = env.quick() ? 10 : 50;
  for (auto [n, q] : std::vector<std::pair<unsigned, std::uint32_t>>{{2, 2}, {2, 3}, {3, 2}}) {
    auto ctx = env.context(n, q);
    auto rep = DepthZeroRep::make(ctx, ctx->cuspidal_rows()[0]);
    const WindowMatrix one = WindowMatrix::identity(rep->ring(), n);
    const bool unit = rep->whittaker_newform(one) == 1 && rep->whittaker_newform_k(one) == 1;
    std::mt19937_64 rng(mix(env.opt.seed, 60 + n * 10 + q));
    std::size_t agree = 0, nonzero = 0;
    for (int i = 0; i < support_n; ++i) {
      const WindowMatrix g = rep->random_whittaker_support(rng);
      const std::uint64_t w = rep->whittaker_newform(g);
      if (rep->in_whittaker_support(g) && w == rep->whittaker_newform_k(g)) ++agree;
      if (w) ++nonzero;
    }
    std::size_t off = 0, vanish = 0, attempts = 0, outside = 0;
    while (off < static_cast<std::size_t>(off_n) && attempts < 100000) {
      ++attempts;
      const WindowMatrix g = generic_point(*rep, rng, 1);
      try {
        if (rep->in_whittaker_support(g)) continue;
      } catch (const WindowOverflow&) {
        ++outside;  // redraw: pole past the working window
        continue;
      }
      ++off;
      if (rep->whittaker_newform(g) == 0 && rep->whittaker_newform_k(g) == 0) ++vanish;
    }
    const bool ok = unit && agree == static_cast<std::size_t>(support_n) && off == static_cast<std::size_t>(off_n) &&
                    vanish == off;
    r.pass = r.pass && ok;
    r.payload[label(n, q)] = {{"W(1)=1", unit},  {"support_points", support_n}, {"agree", agree},
                              {"nonzero", nonzero}, {"off_support", off}, {"vanish", vanish}, {"redrawn", outside}};
  }
  // averaging lemma: exhaustive g
  for (auto [n, q, count] : std::vector<std::tuple<unsigned, std::uint32_t, int>>{
           {2, 3, env.quick() ? 10 : 100}, {3, 2, env.quick() ? 3 : 20}}) {
    auto ctx = env.context(n, q);
    const auto psi = make_additive_character(ctx->G->field(), ctx->K);
    const auto cos = unipotent_cosets(*ctx->G);
    std::mt19937_64 rng(mix(env.opt.seed, 70 + n));
    std::size_t checks = 0, fails = 0;
    for (int a = 0; a < count; ++a) {
      const auto alpha = random_whittaker_vector(*ctx, cos, psi, rng);
      for (gidx g = 0; g < ctx->G->size(); ++g, ++checks)
        if (!averaging_lemma_check(*ctx, psi, alpha.values, g)) ++fails;
    }
    r.pass = r.pass && fails == 0;
    r.payload["averaging_r" + std::to_string(n)] = {{"q", q}, {"alphas", count}, {"checks", checks}, {"failures", fails}};
  }
  r.summary = "W(1) = 1, two expressions agree, vanishing off support, averaging lemma at r = 2, 3";
  return r;
}

CriterionResult criterion_partition(Env& env) {
  CriterionResult r{7, "coset partition and |D_n(m)|", true, "", json::array(), 0};
  std::size_t cases = 0;
  const double limit = env.quick() ? 1e4 : 1e6;
  for (unsigned n : {2u, 3u, 4u})
    for (std::uint32_t q : {2u, 3u, 4u, 5u})
      for (int m = 1;; ++m) {
        double size = 1;
        for (unsigned i = 0; i < n * static_cast<unsigned>(m); ++i) size *= q;
        if (size > limit) break;
        const Field F = field_for(q);
        const auto rep = verify_coset_partition(F, LocalRing::Mode::Equal, n, m);
        const LocalRing R = LocalRing::default_window(F, n, m);
        std::uint64_t d = 0;
        enumerate_family(Family::D, R, n, m, 0, [&](const CosetRep&) { ++d; });
        const bool ok = rep.pass && d == binom(m - 1, static_cast<int>(n) - 1);
        r.pass = r.pass && ok;
        r.payload.push_back({{"n", n}, {"q", q}, {"m", m}, {"a1", rep.a1}, {"a2", rep.a2}, {"orbit", rep.orbit},
                             {"partition", rep.pass}, {"D", d}});
        ++cases;
      }
  r.summary = std::to_string(cases) + " (n,q,m) with q^{nm} <= " + (env.quick() ? "10^4" : "10^6");
  return r;
}

json check_json(const CheckReport& c) {
  return {{"drawn", c.drawn}, {"accepted", c.accepted}, {"counterexamples", c.counterexamples}};
}

CriterionResult criterion_minimax(Env& env) {
  CriterionResult r{8, "minimax checks", true, "", json::object(), 0};
  MinimaxOptions o;
  o.samples = env.quick() ? 1000 : 10000;
  o.seed = env.opt.seed;
  o.strict = false;
  for (auto [n, m, q] : std::vector<std::tuple<unsigned, int, std::uint32_t>>{{2, 1, 2}, {2, 1, 3}, {2, 3, 2}, {3, 1, 2}}) {
    const StratumData S = build_stratum(n, m, field_for(q));
    const bool inv = verify_stratum(S).ok();
    const auto a = check_lemma_psibeta(S, o);
    const auto I = check_intersections(S, o);
    const auto T = check_theta_triviality(S, o);
    const bool ok = inv && a.pass() && I.pass() && T.pass() && a.accepted >= o.samples && I.core.accepted >= o.samples &&
                    I.part1.accepted >= o.samples && I.part2.accepted >= o.samples && I.part3.accepted >= o.samples &&
                    T.theta.accepted >= o.samples && T.conductor == static_cast<int>(n) * (m + 1);
    r.pass = r.pass && ok;
    r.payload["(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(q) + ")"] = {
        {"invariants", inv},
        {"lemma_psibeta", check_json(a)},
        {"intersection_core", check_json(I.core)},
        {"intersection_1", check_json(I.part1)},
        {"intersection_2", check_json(I.part2)},
        {"intersection_3", check_json(I.part3)},
        {"theta", check_json(T.theta)},
        {"conductor", T.conductor}};
  }
  r.summary = std::to_string(o.samples) + " samples per check at 4 strata, c = n(m+1)";
  return r;
}

CriterionResult criterion_dixon(Env& env) {
  CriterionResult r{9, "Dixon table vs GL_2 oracle, orthogonality", true, "", json::object(), 0};
  for (std::uint32_t q : {2u, 3u, 5u}) {
    auto ctx = env.context(2, q);
    bool orth = true;
    try {
      check_orthogonality(*ctx->G, ctx->classes, ctx->table);
    } catch (const InconsistentOrthogonality&) {
      orth = false;
    }
    std::vector<std::size_t> matched;
    for (auto j : regular_theta_orbits(q)) {
      const auto f = gl2_cuspidal_oracle(*ctx, j);
      const auto it = std::find(ctx->table.values.begin(), ctx->table.values.end(), f);
      if (it != ctx->table.values.end()) matched.push_back(static_cast<std::size_t>(it - ctx->table.values.begin()));
    }
    std::sort(matched.begin(), matched.end());
    const bool ok = orth && matched == ctx->cuspidal_rows() && ctx->table.rows() == ctx->classes.count();
    r.pass = r.pass && ok;
    r.payload[label(2, q)] = {{"rows", ctx->table.rows()}, {"cuspidal", ctx->cuspidal_rows()},
                              {"oracle_rows", matched}, {"orthogonal", orth}};
  }
  r.summary = "cuspidal rows equal the oracle rows at q = 2, 3, 5; orthogonality exact";
  return r;
}

template <class Fn>
CriterionResult timed(int id, const std::string& title, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r = CriterionResult{id, title, false, std::string("error: ") + e.what(), json::object(), 0};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_core(const SuiteOptions& opt) {
  Env env{opt, {}};
  auto want = [&](int id) { return opt.only.empty() || std::count(opt.only.begin(), opt.only.end(), id) > 0; };
  std::vector<CriterionResult> out;
  if (want(1)) out.push_back(timed(1, "conductor", [&] { return criterion_conductor(env); }));
  if (want(2)) out.push_back(timed(2, "oldforms", [&] { return criterion_oldforms(env); }));
  if (want(3)) out.push_back(timed(3, "bessel", [&] { return criterion_bessel(env); }));
  if (want(4)) out.push_back(timed(4, "newform eval", [&] { return criterion_eval(env); }));
  if (want(5)) out.push_back(timed(5, "coefficients", [&] { return criterion_coefficients(env); }));
  if (want(6)) out.push_back(timed(6, "whittaker", [&] { return criterion_whittaker(env); }));
  if (want(7)) out.push_back(timed(7, "partition", [&] { return criterion_partition(env); }));
  if (want(8)) out.push_back(timed(8, "minimax", [&] { return criterion_minimax(env); }));
  if (want(9)) out.push_back(timed(9, "dixon", [&] { return criterion_dixon(env); }));
  return out;
}

}  // namespace

std::vector<CriterionResult> run_suite(const SuiteOptions& opt) {
  std::vector<CriterionResult> out = run_core(opt);
  const bool want10 = opt.only.empty() || std::count(opt.only.begin(), opt.only.end(), 10) > 0;
  if (want10) {
    out.push_back(timed(10, "determinism", [&] {
      SuiteOptions o = opt;
      o.only.clear();
      for (int i = 1; i <= 9; ++i) o.only.push_back(i);
      const std::string a = suite_payload(run_core(o)).dump();
      const std::string b = suite_payload(run_core(o)).dump();
      CriterionResult r{10, "identical payloads for a repeated seed", a == b, "", json::object(), 0};
      r.payload = {{"sha256_first", sha256_hex(a)}, {"sha256_second", sha256_hex(b)}, {"bytes", a.size()}};
      r.summary = "two runs with seed " + std::to_string(opt.seed) + ", " + std::to_string(a.size()) + " payload bytes";
      return r;
    }));
  }
  return out;
}

json suite_payload(const std::vector<CriterionResult>& results) {
  json j = json::array();
  for (const auto& r : results)
    j.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"payload", r.payload}});
  return j;
}

}  // namespace newform
