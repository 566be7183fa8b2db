#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace opuc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// The eleven acceptance criteria at their pinned tolerances. quick shrinks
// sample counts and chain lengths.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 20240601,
                                            bool quick = false);
CriterionResult run_criterion(int id, std::uint64_t seed, bool quick);

nlohmann::json to_json(const std::vector<CriterionResult>& results,
                       std::uint64_t seed, bool quick);

}  // namespace opuc
