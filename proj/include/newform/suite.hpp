#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "newform/field.hpp"

namespace newform {

struct SuiteOptions {
  std::string profile = "desk";  // desk: full acceptance scope; quick: reduced sample counts
  std::uint64_t seed = 0;
  bool use_cache = false;
  std::vector<int> only;         // empty: all criteria
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  nlohmann::json payload;  // deterministic for a fixed seed
  double seconds = 0;
};

inline constexpr const char* kArtifactVersion = "0.1.0";

// F_q for a prime power q; InvalidArgument otherwise
Field field_for(std::uint32_t q);

std::vector<CriterionResult> run_suite(const SuiteOptions& opt);
// Criteria with id and payload only; the hashed region of a report.
nlohmann::json suite_payload(const std::vector<CriterionResult>& results);

}  // namespace newform
