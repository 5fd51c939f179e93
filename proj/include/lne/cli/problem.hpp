#pragma once

// Problem files for the command-line tool. A problem is a JSON object:
//
//   {
//     "weights": [0.75, 0.25],
//     "params": {"alpha": 2, "beta": 1},
//     "constraints": [{"g": [0, 1, 2], "G": 0.8}],
//     "prior": [0.5, 0.3, 0.2],
//     "solver": {"tol_residual": 1e-10, "max_iter": 200, "seed": 7},
//     "n": 3
//   }
//
// Every field is optional at parse time; each command checks for the ones
// it needs. Unknown fields are rejected.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lne/errors.hpp"
#include "lne/optimize.hpp"

namespace lne::cli {

/// Malformed or ill-typed input. The message names the line and column for
/// syntax errors and the field path (e.g. constraints[1].G) otherwise.
class InputError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ConstraintSpec {
  std::vector<double> g;
  double target = 0.0;
};

struct ProblemFile {
  std::optional<std::vector<double>> weights;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<ConstraintSpec> constraints;
  std::optional<std::vector<double>> prior;
  SolverConfig solver;
  std::optional<std::size_t> n;
};

/// `source` only labels messages.
ProblemFile parse_problem(std::string_view text, std::string_view source = "input");

}  // namespace lne::cli
