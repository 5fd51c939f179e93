#pragma once

// Machine-checkable acceptance criteria for the library, plus diagnostics
// that are reported but never gate a run.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lne::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  // Observations that contradict a stated claim but do not fail the check.
  std::vector<std::string> findings;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult(std::uint64_t seed)> run;
};

/// Criteria 1..14 in order. Each run derives its draws from `seed` and its id.
const std::vector<Criterion>& acceptance_criteria();

struct Diagnostic {
  std::string name;
  std::string detail;
};

std::vector<Diagnostic> run_diagnostics(std::uint64_t seed);

inline constexpr std::uint64_t default_seed = 20240531;

}  // namespace lne::verify
