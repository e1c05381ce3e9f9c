#pragma once
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "newform/bessel.hpp"
#include "newform/characters.hpp"
#include "newform/local.hpp"

namespace newform {

std::string sha256_hex(const std::string& bytes);

namespace cache {

constexpr int kVersion = 1;
using Params = std::vector<std::pair<std::string, std::string>>;

// NEWFORM_CACHE_DIR, else ./.newform-cache
std::filesystem::path directory();
// sha256 of "kind\nk1=v1\nk2=v2\n..." in the given order
std::string key(const std::string& kind, const Params& params);
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

// nullopt when missing, unreadable, of another version or for another key
std::optional<nlohmann::json> read(const std::string& kind, const std::string& key);
void write(const std::string& kind, const std::string& key, const Params& params, const nlohmann::json& payload);

enum class Outcome { Computed, Hit, Rejected };  // Rejected: entry failed re-verification, recomputed
const char* outcome_name(Outcome o);

}  // namespace cache

// Character table through the cache; orthogonality is re-checked on every load.
std::shared_ptr<const GroupContext> cached_context(unsigned n, const Field& F, std::uint64_t seed, bool use_cache,
                                                   cache::Outcome* outcome = nullptr);
// Bessel table through the cache; its defining properties are re-checked on load.
BesselTable cached_bessel(const GroupContext& ctx, std::size_t row, fq_t psi_c, bool use_cache,
                          cache::Outcome* outcome = nullptr);
// Support transversal through the cache; size and y_0 = 1 re-checked on load.
std::vector<WindowMatrix> cached_transversal(const LocalRing& R, unsigned n, int m, bool use_cache,
                                             cache::Outcome* outcome = nullptr);

nlohmann::json table_json(const GroupContext& ctx);
nlohmann::json matrix_json(const WindowMatrix& x);
WindowMatrix matrix_from_json(const LocalRing& R, unsigned n, const nlohmann::json& j);

}  // namespace newform
