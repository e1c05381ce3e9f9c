#include "newform/cache.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "newform/errors.hpp"
#include "newform/pattern.hpp"

namespace newform {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

namespace cache {

fs::path directory() {
  const char* env = std::getenv("NEWFORM_CACHE_DIR");
  return env && *env ? fs::path(env) : fs::path(".newform-cache");
}

std::string key(const std::string& kind, const Params& params) {
  std::string s = kind + "\n";
  for (const auto& [k, v] : params) s += k + "=" + v + "\n";
  return sha256_hex(s);
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {
fs::path entry_path(const std::string& kind, const std::string& key) { return directory() / (kind + "-" + key + ".json"); }
}  // namespace

std::optional<json> read(const std::string& kind, const std::string& key) {
  std::ifstream in(entry_path(kind, key), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    if (j.value("version", -1) != kVersion || j.value("kind", "") != kind || j.value("key", "") != key)
      return std::nullopt;
    return j.at("payload");
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void write(const std::string& kind, const std::string& key, const Params& params, const json& payload) {
  json j;
  j["version"] = kVersion;
  j["kind"] = kind;
  j["key"] = key;
  json p = json::array();
  for (const auto& [k, v] : params) p.push_back({k, v});
  j["params"] = p;
  j["payload"] = payload;
  write_atomic(entry_path(kind, key), j.dump());
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Computed: return "computed";
    case Outcome::Hit: return "hit";
    case Outcome::Rejected: return "rejected";
  }
  return "?";
}

}  // namespace cache

json table_json(const GroupContext& ctx) {
  json j;
  j["ell"] = ctx.K.ell();
  j["order"] = ctx.K.order();
  j["zeta"] = ctx.K.zeta();
  j["seed"] = ctx.table.seed;
  j["degree"] = ctx.table.degree;
  j["values"] = ctx.table.values;
  j["class_reps"] = ctx.classes.reps;
  return j;
}

std::shared_ptr<const GroupContext> cached_context(unsigned n, const Field& F, std::uint64_t seed, bool use_cache,
                                                   cache::Outcome* outcome) {
  const cache::Params params{{"n", std::to_string(n)}, {"field", F.descriptor()}, {"seed", std::to_string(seed)}};
  const std::string key = cache::key("character-table", params);
  cache::Outcome o = cache::Outcome::Computed;
  if (use_cache) {
    if (auto p = cache::read("character-table", key)) {
      try {
        auto G = std::make_shared<const GLGroup>(n, F);
        ModField K((*p)["ell"].get<std::uint64_t>(), (*p)["order"].get<std::uint64_t>(),
                   (*p)["zeta"].get<std::uint64_t>());
        CharacterTable T;
        T.seed = (*p)["seed"].get<std::uint64_t>();
        T.degree = (*p)["degree"].get<std::vector<std::uint64_t>>();
        T.values = (*p)["values"].get<std::vector<std::vector<std::uint64_t>>>();
        auto ctx = make_context_from_table(G, K, std::move(T));  // re-verifies orthogonality
        if (ctx->classes.reps != (*p)["class_reps"].get<std::vector<gidx>>())
          throw InconsistentOrthogonality("class order changed");
        if (outcome) *outcome = cache::Outcome::Hit;
        return ctx;
      } catch (const std::exception&) {
        o = cache::Outcome::Rejected;
      }
    }
  }
  auto ctx = make_context(n, F, seed);
  if (use_cache) cache::write("character-table", key, params, table_json(*ctx));
  if (outcome) *outcome = o;
  return ctx;
}

BesselTable cached_bessel(const GroupContext& ctx, std::size_t row, fq_t psi_c, bool use_cache,
                          cache::Outcome* outcome) {
  const GLGroup& G = *ctx.G;
  const cache::Params params{{"n", std::to_string(G.n())},
                             {"field", G.field().descriptor()},
                             {"ell", std::to_string(ctx.K.ell())},
                             {"table_seed", std::to_string(ctx.table.seed)},
                             {"row", std::to_string(row)},
                             {"psi_c", std::to_string(psi_c)}};
  const std::string key = cache::key("bessel-table", params);
  const AdditiveCharacter psi = make_additive_character(G.field(), ctx.K, psi_c);
  cache::Outcome o = cache::Outcome::Computed;
  if (use_cache) {
    if (auto p = cache::read("bessel-table", key)) {
      BesselTable B;
      B.row = row;
      B.psi = psi;
      B.values = p->get<ValueArray>();
      bool ok = B.values.size() == G.size();
      if (ok)
        for (const auto& v : check_bessel_properties(ctx, B)) ok = ok && v.pass;
      if (ok) {
        if (outcome) *outcome = cache::Outcome::Hit;
        return B;
      }
      o = cache::Outcome::Rejected;
    }
  }
  BesselTable B = bessel_from_character(ctx, row, psi);
  if (use_cache) cache::write("bessel-table", key, params, B.values);
  if (outcome) *outcome = o;
  return B;
}

json matrix_json(const WindowMatrix& x) {
  json rows = json::array();
  for (unsigned i = 0; i < x.n(); ++i) {
    json r = json::array();
    for (unsigned j = 0; j < x.n(); ++j) {
      const Scalar& s = x.at(i, j);
      r.push_back({{"lo", s.lo()}, {"prec", s.is_exact() ? -1 : s.prec()}, {"digits", s.digits()}});
    }
    rows.push_back(r);
  }
  return rows;
}

WindowMatrix matrix_from_json(const LocalRing& R, unsigned n, const json& j) {
  WindowMatrix x(R, n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned k = 0; k < n; ++k) {
      const json& e = j.at(i).at(k);
      Scalar s = Scalar::from_digits(R, e.at("lo").get<int>(), e.at("digits").get<std::vector<fq_t>>());
      const int prec = e.at("prec").get<int>();
      if (prec >= 0) s = s.truncate(prec);
      x.at(i, k) = s;
    }
  return x;
}

std::vector<WindowMatrix> cached_transversal(const LocalRing& R, unsigned n, int m, bool use_cache,
                                             cache::Outcome* outcome) {
  const cache::Params params{{"ring", R.describe()}, {"n", std::to_string(n)}, {"m", std::to_string(m)}};
  const std::string key = cache::key("transversal", params);
  const PatternGroup Km = conductor_subgroup(n, m);
  const PatternGroup H = pattern_intersect(Km, conjugate_pattern(full_K(n), sigma(R, n).inverse()));
  const std::uint64_t index = pattern_index(R.residue(), Km, H);
  cache::Outcome o = cache::Outcome::Computed;
  if (use_cache) {
    if (auto p = cache::read("transversal", key)) {
      try {
        std::vector<WindowMatrix> T;
        for (const auto& e : *p) T.push_back(matrix_from_json(R, n, e));
        const WindowMatrix one = WindowMatrix::identity(R, n);
        bool ok = T.size() == index && !T.empty();
        for (unsigned i = 0; ok && i < n; ++i)
          for (unsigned j = 0; j < n; ++j) ok = ok && T[0].at(i, j).same(one.at(i, j));
        for (const auto& y : T) ok = ok && Km.contains(y);
        if (ok) {
          if (outcome) *outcome = cache::Outcome::Hit;
          return T;
        }
      } catch (const std::exception&) {
      }
      o = cache::Outcome::Rejected;
    }
  }
  auto T = support_transversal(R, n, m);
  if (use_cache) {
    json arr = json::array();
    for (const auto& y : T) arr.push_back(matrix_json(y));
    cache::write("transversal", key, params, arr);
  }
  if (outcome) *outcome = o;
  return T;
}

}  // namespace newform
