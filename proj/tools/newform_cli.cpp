#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "newform/cache.hpp"
#include "newform/depth0.hpp"
#include "newform/errors.hpp"
#include "newform/minimax.hpp"
#include "newform/suite.hpp"

using namespace newform;
using nlohmann::json;

namespace {

struct RunConfig {
  unsigned n = 2;
  std::uint32_t p = 2;
  unsigned k = 1;
  std::uint32_t q = 0;  // overrides p, k when set
  std::string mode = "equal";
  int m = 1;
  int m_max = 5;
  std::size_t row = 0;  // index into the cuspidal rows
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::uint64_t block_budget = 2000;
  std::string at = "identity";
  std::string profile = "desk";
  std::string out;
  bool no_cache = false;
  bool csv = false;

  std::uint32_t field_size() const {
    if (q) return q;
    std::uint32_t r = 1;
    for (unsigned i = 0; i < k; ++i) r *= p;
    return r;
  }

  json to_json(const std::string& command) const {
    return {{"command", command},     {"n", n},         {"p", field_for(field_size()).p()},
            {"k", field_for(field_size()).k()}, {"q", field_size()}, {"mode", mode},
            {"m", m},                 {"m_max", m_max}, {"row", row},
            {"seed", seed},           {"samples", samples}, {"block_budget", block_budget}, {"at", at},   {"profile", profile},
            {"out", out},             {"cache", !no_cache}};
  }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  json to_json() const {
    json j = json::array();
    for (const auto& r : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      j.push_back(o);
    }
    return j;
  }

  std::string csv() const {
    auto field = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string o = "\"";
      for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
      return o + "\"";
    };
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + field(header[i]);
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + field(r[i]);
      out += "\n";
    }
    return out;
  }
};

struct Outcome {
  json payload;
  std::optional<Table> table;
  bool ok = true;
};

int emit(const RunConfig& cfg, const std::string& command, const Outcome& o, double seconds) {
  const std::string body = o.payload.dump();
  json report = {{"config", cfg.to_json(command)},
                 {"seed", cfg.seed},
                 {"version", kArtifactVersion},
                 {"payload", o.payload},
                 {"payload_sha256", sha256_hex(body)},
                 {"timing", {{"wall_seconds", seconds}}}};
  const std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    cache::write_atomic(std::filesystem::path(cfg.out) / (command + ".json"), text + "\n");
    if (cfg.csv && o.table) cache::write_atomic(std::filesystem::path(cfg.out) / (command + ".csv"), o.table->csv());
  } else if (cfg.csv && o.table) {
    std::cerr << o.table->csv();
  }
  return o.ok ? 0 : 1;
}

std::string values_str(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::shared_ptr<const GroupContext> context_for(const RunConfig& cfg) {
  return cached_context(cfg.n, field_for(cfg.field_size()), cfg.seed, !cfg.no_cache);
}

std::shared_ptr<const DepthZeroRep> rep_for(const RunConfig& cfg) {
  if (cfg.n < 2) throw InvalidArgument("newform routines need n >= 2");
  auto ctx = context_for(cfg);
  const auto rows = ctx->cuspidal_rows();
  if (cfg.row >= rows.size()) throw InvalidArgument("row index past the cuspidal rows");
  return DepthZeroRep::make(ctx, rows[cfg.row]);
}

void require_equal(const RunConfig& cfg) {
  if (cfg.mode != "equal")
    throw InvalidArgument("this command runs in equal characteristic only; depth-zero data do not depend on the mode");
}

Outcome cmd_chartable(const RunConfig& cfg) {
  auto ctx = context_for(cfg);
  Table t{{"row", "degree", "cuspidal", "values"}, {}};
  const auto cusp = ctx->cuspidal_rows();
  for (std::size_t i = 0; i < ctx->table.rows(); ++i) {
    const bool c = std::find(cusp.begin(), cusp.end(), i) != cusp.end();
    t.rows.push_back({std::to_string(i), std::to_string(ctx->table.degree[i]), c ? "1" : "0",
                      values_str(ctx->table.values[i])});
  }
  Outcome o;
  o.payload = {{"q", cfg.field_size()},
               {"ell", ctx->K.ell()},
               {"classes", ctx->classes.reps},
               {"rows", ctx->table.rows()},
               {"cuspidal", cusp},
               {"table", t.to_json()}};
  if (cfg.n < 2) o.payload["note"] = "n = 1: table only, newform routines need n >= 2";
  o.table = t;
  return o;
}

Outcome cmd_cuspidals(const RunConfig& cfg) {
  auto ctx = context_for(cfg);
  Table t{{"index", "row", "degree", "central_character"}, {}};
  std::size_t i = 0;
  for (auto r : ctx->cuspidal_rows())
    t.rows.push_back({std::to_string(i++), std::to_string(r), std::to_string(ctx->table.degree[r]),
                      values_str(central_character(*ctx, r))});
  Outcome o;
  o.payload = {{"q", cfg.field_size()}, {"cuspidal", t.to_json()}};
  o.table = t;
  return o;
}

Outcome cmd_oldforms(const RunConfig& cfg) {
  if (cfg.n < 2) throw InvalidArgument("oldforms needs n >= 2");
  require_equal(cfg);
  auto ctx = context_for(cfg);
  const auto rows = ctx->cuspidal_rows();
  if (cfg.row >= rows.size()) throw InvalidArgument("row index past the cuspidal rows");
  MackeyOptions mo;
  mo.block_budget = cfg.block_budget;
  mo.seed = cfg.seed + 1;
  Table t{{"m", "dimension"}, {}};
  json dims = json::object();
  for (int m = 0; m <= cfg.m_max; ++m) {
    const auto d = mackey_dimension(*ctx, rows[cfg.row], m, mo).total;
    t.rows.push_back({std::to_string(m), std::to_string(d)});
    dims[std::to_string(m)] = d;
  }
  Outcome o;
  o.payload = {{"row", rows[cfg.row]}, {"dimensions", dims}};
  o.table = t;
  return o;
}

Outcome cmd_newform_eval(const RunConfig& cfg) {
  require_equal(cfg);
  auto rep = rep_for(cfg);
  const ModField& K = rep->K();
  const gidx e = rep->G().identity();
  const std::uint64_t lambda =
      K.mul(rep->newform_eval(rep->Sigma())[e], K.inv(rep->newform_integral_eval(rep->Sigma())[e]));
  std::mt19937_64 rng(cfg.seed);
  Table t{{"g", "value_at_1", "integral_value_at_1", "equal"}, {}};
  Outcome o;
  const std::uint64_t samples = cfg.samples ? cfg.samples : 20;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const WindowMatrix g = i % 2 == 0 ? rep->random_support_point(rng) : rep->random_sigma_conj(rng);
    const ValueArray v = rep->newform_eval(g);
    ValueArray w = rep->newform_integral_eval(g);
    for (auto& x : w) x = K.mul(lambda, x);
    o.ok = o.ok && v == w;
    t.rows.push_back({g.str(), std::to_string(v[e]), std::to_string(w[e]), v == w ? "1" : "0"});
  }
  o.payload = {{"normalization", lambda}, {"points", t.to_json()}, {"all_equal", o.ok}};
  o.table = t;
  return o;
}

Outcome cmd_coeff(const RunConfig& cfg) {
  require_equal(cfg);
  auto rep = rep_for(cfg);
  std::mt19937_64 rng(cfg.seed);
  Table t{{"g", "formula", "direct", "equal"}, {}};
  Outcome o;
  const std::uint64_t samples = cfg.samples ? cfg.samples : 50;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const WindowMatrix g = rep->random_sigma_conj(rng);
    const auto f = rep->matrix_coeff_formula(g), d = rep->matrix_coeff_direct(g);
    o.ok = o.ok && f == d;
    t.rows.push_back({g.str(), std::to_string(f), std::to_string(d), f == d ? "1" : "0"});
  }
  o.payload = {{"constant", rep->coefficient_constant()}, {"points", t.to_json()}, {"all_equal", o.ok}};
  o.table = t;
  return o;
}

Outcome cmd_whittaker(const RunConfig& cfg) {
  require_equal(cfg);
  auto rep = rep_for(cfg);
  Table t{{"g", "W", "W_k", "in_support"}, {}};
  Outcome o;
  auto add = [&](const WindowMatrix& g) {
    const auto w = rep->whittaker_newform(g), wk = rep->whittaker_newform_k(g);
    o.ok = o.ok && w == wk;
    t.rows.push_back({g.str(), std::to_string(w), std::to_string(wk), rep->in_whittaker_support(g) ? "1" : "0"});
  };
  if (cfg.at == "identity") {
    add(WindowMatrix::identity(rep->ring(), cfg.n));
  } else if (cfg.at == "random") {
    std::mt19937_64 rng(cfg.seed);
    for (std::uint64_t i = 0; i < (cfg.samples ? cfg.samples : 20); ++i) add(rep->random_whittaker_support(rng));
  } else {
    throw InvalidArgument("--at takes identity or random");
  }
  o.payload = {{"points", t.to_json()}, {"expressions_agree", o.ok}};
  if (cfg.at == "identity") o.payload["value"] = std::stoull(t.rows[0][1]);
  o.table = t;
  return o;
}

json report_json(const CheckReport& c) {
  return {{"name", c.name}, {"drawn", c.drawn}, {"accepted", c.accepted}, {"counterexamples", c.counterexamples},
          {"pass", c.pass()}};
}

Outcome cmd_minimax(const RunConfig& cfg) {
  require_equal(cfg);
  const StratumData S = build_stratum(cfg.n, cfg.m, field_for(cfg.field_size()));
  MinimaxOptions mo;
  mo.samples = cfg.samples ? cfg.samples : 10000;
  mo.seed = cfg.seed;
  mo.strict = false;
  const auto a = check_lemma_psibeta(S, mo);
  const auto mult = check_multiplicativity(S, mo);
  const auto I = check_intersections(S, mo);
  const auto T = check_theta_triviality(S, mo);
  const bool inv = verify_stratum(S).ok();
  Table t{{"check", "drawn", "accepted", "counterexamples"}, {}};
  for (const CheckReport* c : {&a, &mult, &I.core, &I.part1, &I.part2, &I.part3, &T.theta})
    t.rows.push_back({c->name, std::to_string(c->drawn), std::to_string(c->accepted),
                      std::to_string(c->counterexamples)});
  Outcome o;
  o.ok = inv && a.pass() && mult.pass() && I.pass() && T.pass();
  json checks = json::array();
  for (const CheckReport* c : {&a, &mult, &I.core, &I.part1, &I.part2, &I.part3, &T.theta})
    checks.push_back(report_json(*c));
  o.payload = {{"stratum", {{"n", S.n}, {"m", S.m}, {"residue_poly", S.residue_poly}}},
               {"invariants", inv},
               {"conductor", T.conductor},
               {"checks", checks}};
  o.table = t;
  return o;
}

Outcome cmd_selftest(const RunConfig& cfg) {
  SuiteOptions so;
  so.profile = cfg.profile;
  so.seed = cfg.seed;
  so.use_cache = !cfg.no_cache;
  if (so.profile != "desk" && so.profile != "quick") throw InvalidArgument("profile is desk or quick");
  const auto results = run_suite(so);
  Table t{{"criterion", "title", "pass", "summary"}, {}};
  Outcome o;
  for (const auto& r : results) {
    o.ok = o.ok && r.pass;
    t.rows.push_back({std::to_string(r.id), r.title, r.pass ? "PASS" : "FAIL", r.summary});
    std::cerr << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " (" << r.seconds
              << "s)\n";
  }
  o.payload = {{"profile", so.profile}, {"criteria", suite_payload(results)}, {"all_pass", o.ok}};
  o.table = t;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-zero newforms for GL_n and minimax checks"};
  app.set_config("--config", "", "INI file with RunConfig keys");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--n", cfg.n, "rank n");
  app.add_option("--p", cfg.p, "residue characteristic");
  app.add_option("--k", cfg.k, "q = p^k");
  app.add_option("--q", cfg.q, "residue field size, instead of --p/--k");
  app.add_option("--mode", cfg.mode, "equal or mixed")->check(CLI::IsMember({"equal", "mixed"}));
  app.add_option("--seed", cfg.seed, "seed for every randomized step");
  app.add_option("--block-budget", cfg.block_budget, "Mackey blocks up to this size are certified exhaustively");
  app.add_option("--out", cfg.out, "directory for JSON and CSV reports");
  app.add_flag("--no-cache", cfg.no_cache, "bypass the table cache");
  app.add_flag("--csv", cfg.csv, "also emit tables as CSV");

  std::string chosen;
  std::function<Outcome(const RunConfig&)> run;
  auto sub = [&](const char* name, const char* help, std::function<Outcome(const RunConfig&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&, name, fn] {
      chosen = name;
      run = fn;
    });
    return s;
  };
  auto* chartable = sub("chartable", "character table with cuspidality flags", cmd_chartable);
  chartable->add_option("n_pos", cfg.n, "n");
  chartable->add_option("q_pos", cfg.q, "q");
  auto* cusp = sub("cuspidals", "cuspidal rows, degrees, central characters", cmd_cuspidals);
  cusp->add_option("n_pos", cfg.n, "n");
  cusp->add_option("q_pos", cfg.q, "q");
  auto* old = sub("oldforms", "dim of K(m)-fixed vectors for m = 0..m_max", cmd_oldforms);
  old->add_option("n_pos", cfg.n, "n");
  old->add_option("q_pos", cfg.q, "q");
  old->add_option("m_max", cfg.m_max, "largest m");
  old->add_option("--row", cfg.row, "cuspidal row index");
  for (auto [name, help, fn] : std::vector<std::tuple<const char*, const char*, Outcome (*)(const RunConfig&)>>{
           {"newform-eval", "newform value vs the integral expression", cmd_newform_eval},
           {"coeff", "matrix coefficient formula vs direct pairing", cmd_coeff}}) {
    auto* s = sub(name, help, fn);
    s->add_option("--samples", cfg.samples, "points");
    s->add_option("--row", cfg.row, "cuspidal row index");
  }
  auto* wh = sub("whittaker", "Whittaker newform values", cmd_whittaker);
  wh->add_option("--at", cfg.at, "identity or random");
  wh->add_option("--samples", cfg.samples, "points for --at random");
  wh->add_option("--row", cfg.row, "cuspidal row index");
  auto* mm = sub("minimax-verify", "sampled minimax checks on one stratum", cmd_minimax);
  mm->add_option("--m", cfg.m, "odd depth m");
  mm->add_option("--samples", cfg.samples, "accepted samples per check");
  auto* st = sub("selftest", "all acceptance criteria", cmd_selftest);
  st->add_option("--profile", cfg.profile, "desk or quick")->check(CLI::IsMember({"desk", "quick"}));

  CLI11_PARSE(app, argc, argv);
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = run(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(cfg, chosen, o, secs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
