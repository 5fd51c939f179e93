#include "lne/cli/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace lne::cli {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, std::string_view what) {
  throw InputError(fmt::format("field '{}': {}", path, what));
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, fmt::format("expected a number, got {}", v.type_name()));
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(path, "must be finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, fmt::format("expected a list of numbers, got {}", v.type_name()));
  if (v.empty()) field_error(path, "must not be empty");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], fmt::format("{}[{}]", path, i)));
  return out;
}

std::uint64_t whole(const json& v, const std::string& path, std::uint64_t max) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    field_error(path, "expected a non-negative integer");
  }
  const auto x = v.get<std::uint64_t>();
  if (x > max) field_error(path, fmt::format("must be at most {}", max));
  return x;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      field_error(path.empty() ? k : path + "." + k, "unknown field");
    }
  }
}

const json& object(const json& v, const std::string& path) {
  if (!v.is_object()) field_error(path, fmt::format("expected an object, got {}", v.type_name()));
  return v;
}

// nlohmann reports "... parse error at line L, column C: detail"; keep the detail.
std::string parse_detail(const json::parse_error& e) {
  const std::string what = e.what();
  const auto col = what.find("column");
  const auto colon = col == std::string::npos ? std::string::npos : what.find(": ", col);
  return colon == std::string::npos ? what : what.substr(colon + 2);
}

}  // namespace

ProblemFile parse_problem(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError(fmt::format("{}:{}:{}: {}", source, line, column, parse_detail(e)));
  }

  object(doc, "<root>");
  only_keys(doc, "", {"weights", "params", "constraints", "prior", "solver", "n"});
  ProblemFile pf;

  if (doc.contains("weights")) pf.weights = numbers(doc["weights"], "weights");
  if (doc.contains("prior")) pf.prior = numbers(doc["prior"], "prior");
  if (doc.contains("n")) {
    pf.n = static_cast<std::size_t>(whole(doc["n"], "n", 1u << 20));
    if (*pf.n == 0) field_error("n", "must be at least 1");
  }

  if (doc.contains("params")) {
    const json& p = object(doc["params"], "params");
    only_keys(p, "params", {"alpha", "beta"});
    if (p.contains("alpha")) pf.alpha = number(p["alpha"], "params.alpha");
    if (p.contains("beta")) pf.beta = number(p["beta"], "params.beta");
  }

  if (doc.contains("constraints")) {
    const json& cs = doc["constraints"];
    if (!cs.is_array()) field_error("constraints", fmt::format("expected a list, got {}", cs.type_name()));
    for (std::size_t r = 0; r < cs.size(); ++r) {
      const std::string path = fmt::format("constraints[{}]", r);
      const json& c = object(cs[r], path);
      only_keys(c, path, {"g", "G"});
      if (!c.contains("g")) field_error(path + ".g", "missing");
      if (!c.contains("G")) field_error(path + ".G", "missing");
      pf.constraints.push_back({numbers(c["g"], path + ".g"), number(c["G"], path + ".G")});
    }
  }

  if (doc.contains("solver")) {
    const json& s = object(doc["solver"], "solver");
    only_keys(s, "solver", {"tol_residual", "max_iter", "damping", "fd_step", "restarts", "seed"});
    SolverConfig& cfg = pf.solver;
    if (s.contains("tol_residual")) cfg.tol_residual = number(s["tol_residual"], "solver.tol_residual");
    if (s.contains("max_iter")) {
      cfg.max_iter = static_cast<int>(whole(s["max_iter"], "solver.max_iter", 1u << 20));
    }
    if (s.contains("damping")) cfg.damping = number(s["damping"], "solver.damping");
    if (s.contains("fd_step")) cfg.fd_step = number(s["fd_step"], "solver.fd_step");
    if (s.contains("restarts")) {
      cfg.restarts = static_cast<int>(whole(s["restarts"], "solver.restarts", 1u << 16));
    }
    if (s.contains("seed")) cfg.seed = whole(s["seed"], "solver.seed", std::numeric_limits<std::uint64_t>::max());
    try {
      cfg.validate();
    } catch (const InvalidArgument& e) {
      field_error("solver", e.what());
    }
  }
  return pf;
}

}  // namespace lne::cli
