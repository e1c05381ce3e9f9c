#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "newform/cache.hpp"
#include "newform/pattern.hpp"

using namespace newform;
namespace fs = std::filesystem;

namespace {

struct TempCacheDir {
  fs::path dir;
  TempCacheDir() {
    dir = fs::temp_directory_path() / ("newform-cache-test-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    setenv("NEWFORM_CACHE_DIR", dir.c_str(), 1);
  }
  ~TempCacheDir() {
    fs::remove_all(dir);
    unsetenv("NEWFORM_CACHE_DIR");
  }
  fs::path only_entry() const {
    for (const auto& e : fs::directory_iterator(dir)) return e.path();
    return {};
  }
};

void overwrite(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

}  // namespace

TEST_CASE("sha256 and key derivation") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const cache::Params a{{"n", "2"}, {"q", "3"}};
  const cache::Params b{{"q", "3"}, {"n", "2"}};
  CHECK(cache::key("character-table", a) == cache::key("character-table", a));
  CHECK(cache::key("character-table", a) != cache::key("character-table", b));
  CHECK(cache::key("character-table", a) != cache::key("bessel-table", a));
}

TEST_CASE("character table round trip and rejection") {
  TempCacheDir tmp;
  const Field F = Field::make(3, 1);
  cache::Outcome o;
  auto first = cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Computed);
  auto second = cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Hit);
  CHECK(second->table.values == first->table.values);
  CHECK(second->table.degree == first->table.degree);
  CHECK(second->classes.reps == first->classes.reps);

  // tamper with one character value: orthogonality fails on load
  const fs::path entry = tmp.only_entry();
  auto j = nlohmann::json::parse(std::ifstream(entry));
  auto& v = j["payload"]["values"][1][1];
  v = (v.get<std::uint64_t>() + 1) % first->K.ell();
  overwrite(entry, j.dump());
  auto third = cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Rejected);
  CHECK(third->table.values == first->table.values);
  cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Hit);

  // garbage and stale versions are ignored
  overwrite(entry, "{not json");
  cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Computed);
  j = nlohmann::json::parse(std::ifstream(entry));
  j["version"] = cache::kVersion + 1;
  overwrite(entry, j.dump());
  cached_context(2, F, 0, true, &o);
  CHECK(o == cache::Outcome::Computed);

  // no cache: nothing read
  cached_context(2, F, 0, false, &o);
  CHECK(o == cache::Outcome::Computed);
}

TEST_CASE("bessel table round trip and rejection") {
  TempCacheDir tmp;
  auto ctx = make_context(2, Field::make(2, 1));
  const auto row = ctx->cuspidal_rows()[0];
  cache::Outcome o;
  const BesselTable a = cached_bessel(*ctx, row, 1, true, &o);
  CHECK(o == cache::Outcome::Computed);
  const BesselTable b = cached_bessel(*ctx, row, 1, true, &o);
  CHECK(o == cache::Outcome::Hit);
  CHECK(a.values == b.values);
  const fs::path entry = tmp.only_entry();
  auto j = nlohmann::json::parse(std::ifstream(entry));
  j["payload"][0] = 0;  // B(1) must be 1
  overwrite(entry, j.dump());
  const BesselTable c = cached_bessel(*ctx, row, 1, true, &o);
  CHECK(o == cache::Outcome::Rejected);
  CHECK(c.values == a.values);
}

TEST_CASE("transversal round trip") {
  TempCacheDir tmp;
  const LocalRing R = LocalRing::default_window(Field::make(2, 1), 2, 3);
  cache::Outcome o;
  const auto a = cached_transversal(R, 2, 3, true, &o);
  CHECK(o == cache::Outcome::Computed);
  const auto b = cached_transversal(R, 2, 3, true, &o);
  CHECK(o == cache::Outcome::Hit);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (unsigned r = 0; r < 2; ++r)
      for (unsigned c = 0; c < 2; ++c) CHECK(a[i].at(r, c).same(b[i].at(r, c)));
  auto j = nlohmann::json::parse(std::ifstream(tmp.only_entry()));
  j["payload"].erase(j["payload"].size() - 1);
  overwrite(tmp.only_entry(), j.dump());
  cached_transversal(R, 2, 3, true, &o);
  CHECK(o == cache::Outcome::Rejected);
}
