#include "lne/cli/app.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lne/cli/problem.hpp"
#include "lne/entropy.hpp"
#include "lne/errors.hpp"
#include "lne/figures.hpp"
#include "lne/optimize.hpp"
#include "lne/verify/criteria.hpp"

namespace lne::cli {

namespace {

// Twelve significant digits, fixed across platforms.
std::string num(double v) { return fmt::format("{:#.12g}", v + 0.0); }

std::string nums(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += num(v[i]);
  }
  return s;
}

enum class Level { quiet, info, debug };

class Log {
 public:
  Log(std::ostream& err) : err_(err) {
    const char* env = std::getenv("LNE_LOG");
    const std::string_view v = env == nullptr ? "info" : env;
    if (v == "quiet") level_ = Level::quiet;
    if (v == "debug") level_ = Level::debug;
  }

  template <typename... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ != Level::quiet) err_ << "info: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  template <typename... Args>
  void debug(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ == Level::debug) err_ << "debug: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  void error(std::string_view msg) { err_ << "error: " << msg << '\n'; }

 private:
  std::ostream& err_;
  Level level_ = Level::info;
};

struct Options {
  std::string alpha;
  std::string beta;
  std::string family = "lne";
  double step = 0.01;
  int n = 0;
  double p = -1.0;
  std::string input;
  std::string output = "-";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::uint64_t seed_flag = 0;
  double tol_flag = 0.0;
};

double parse_real(std::string_view text, std::string_view flag) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{}: '{}' is not a finite number", flag, text));
  }
  return v;
}

ProblemFile load(const Options& o) {
  if (o.input.empty()) throw InvalidArgument("--input is required for this command");
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("--input: cannot read '{}'", o.input));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_problem(text.str(), o.input);
}

// Command-line orders win over the file's params.
std::optional<double> order(const std::string& flag_value, std::optional<double> from_file, std::string_view flag) {
  if (!flag_value.empty()) return parse_real(flag_value, flag);
  return from_file;
}

double need(std::optional<double> v, std::string_view what) {
  if (!v) throw InvalidArgument(fmt::format("{} is required (flag or params field)", what));
  return *v;
}

int cmd_entropy(const Options& o, std::ostream& out) {
  const ProblemFile pf = load(o);
  if (!pf.weights) throw InputError("field 'weights': missing");
  const WeightVector p(*pf.weights);
  const auto family = parse_family(o.family);
  if (!family) throw InvalidArgument(fmt::format("--family: unknown family '{}'", o.family));
  const auto a = order(o.alpha, pf.alpha, "--alpha");
  const auto b = order(o.beta, pf.beta, "--beta");

  EntropyValue v;
  switch (*family) {
    case Family::shannon: v = shannon(p); break;
    case Family::renyi: v = renyi(p, need(a, "alpha")); break;
    case Family::tsallis: v = tsallis(p, need(a, "alpha (used as q)")); break;
    case Family::kapur: v = kapur(p, need(a, "alpha"), need(b, "beta")); break;
    case Family::norm: v = norm_entropy(p, need(a, "alpha"), need(b, "beta")); break;
    case Family::aczel_daroczy: v = aczel_daroczy(p, need(b, "beta")); break;
    case Family::lne: v = log_norm_entropy(p, EntropyParams(need(a, "alpha"), need(b, "beta"))); break;
    case Family::min_entropy_scaled: v = lne_min_entropy_limit(p, need(b, "beta")); break;
  }
  out << "family: " << to_string(v.family) << '\n';
  if (v.alpha) out << "alpha: " << num(*v.alpha) << '\n';
  if (v.beta) out << "beta: " << num(*v.beta) << '\n';
  out << "value: " << num(v.value) << '\n';
  return exit_ok;
}

int cmd_curve(const Options& o, std::ostream& out) {
  if (o.alpha.empty()) throw InvalidArgument("--alpha is required");
  if (o.beta.empty()) throw InvalidArgument("--beta is required");
  const double alpha = parse_real(o.alpha, "--alpha");
  const std::vector<double> betas = parse_grid(o.beta, "--beta");
  const auto rows = bernoulli_curve(alpha, betas, o.step);
  out << "p,beta,value\n";
  for (const auto& r : rows) out << num(r.p) << ',' << num(r.beta) << ',' << num(r.value) << '\n';
  return exit_ok;
}

int cmd_surface(const Options& o, std::ostream& out) {
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  if (!(o.p >= 0.0 && o.p <= 1.0)) throw InvalidArgument("--p must lie in [0, 1]");
  if (o.alpha.empty()) throw InvalidArgument("--alpha is required");
  if (o.beta.empty()) throw InvalidArgument("--beta is required");
  const auto rows = binomial_surface(o.n, o.p, parse_grid(o.alpha, "--alpha"), parse_grid(o.beta, "--beta"));
  out << "alpha,beta,value\n";
  for (const auto& r : rows) out << num(r.alpha) << ',' << num(r.beta) << ',' << num(r.value) << '\n';
  return exit_ok;
}

void print_solution(std::ostream& out, std::string_view problem, const EntropyParams& ab, const MaxEntSolution& s) {
  std::vector<double> p(s.p.begin(), s.p.end());
  std::vector<std::string> clamped;
  for (std::size_t i : s.report.clamped_states) clamped.push_back(std::to_string(i));
  out << "problem: " << problem << '\n';
  out << "alpha: " << num(ab.alpha()) << '\n';
  out << "beta: " << num(ab.beta()) << '\n';
  out << "n: " << p.size() << '\n';
  out << "branch: " << to_string(s.branch) << '\n';
  out << "converged: " << (s.report.converged ? "true" : "false") << '\n';
  out << "p: " << nums(p) << '\n';
  out << "lambda: " << nums(s.lambdas) << '\n';
  out << "Z: " << num(s.Z) << '\n';
  out << "entropy: " << num(log_norm_entropy(s.p, ab).value) << '\n';
  out << "iterations: " << s.report.iterations << '\n';
  out << "restarts: " << s.report.restarts_used << '\n';
  out << "residual: " << num(s.report.final_residual_norm) << '\n';
  out << "clamped: " << fmt::format("{}", fmt::join(clamped, ",")) << '\n';
}

int cmd_solve(const Options& o, bool minxent, std::ostream& out, Log& log) {
  const ProblemFile pf = load(o);
  const EntropyParams ab(need(order(o.alpha, pf.alpha, "--alpha"), "alpha"),
                         need(order(o.beta, pf.beta, "--beta"), "beta"));
  SolverConfig cfg = pf.solver;
  if (o.seed) cfg.seed = *o.seed;
  if (o.tol) cfg.tol_residual = *o.tol;
  cfg.validate();

  std::vector<std::vector<double>> g;
  std::vector<double> targets;
  for (const auto& c : pf.constraints) {
    g.push_back(c.g);
    targets.push_back(c.target);
  }
  const ConstraintSet cs = g.empty() ? ConstraintSet(ab.beta()) : ConstraintSet(g, targets, ab.beta());

  std::optional<WeightVector> prior;
  std::size_t n = 0;
  if (minxent) {
    if (!pf.prior) throw InputError("field 'prior': missing (required by minxent)");
    prior.emplace(*pf.prior);
    n = prior->size();
  } else if (o.n > 0) {
    n = static_cast<std::size_t>(o.n);
  } else if (pf.n) {
    n = *pf.n;
  } else if (!g.empty()) {
    n = g.front().size();
  } else if (pf.weights) {
    n = pf.weights->size();
  } else {
    throw InvalidArgument("number of states unknown: give --n, field 'n', constraints or weights");
  }
  log.info("{}: n = {}, m = {}, alpha = {}, beta = {}", minxent ? "minxent" : "maxent", n, cs.count(),
           num(ab.alpha()), num(ab.beta()));
  log.debug("solver: tol {:.3e}, max_iter {}, damping {}, fd_step {:.3e}, restarts {}, seed {}", cfg.tol_residual,
            cfg.max_iter, cfg.damping, cfg.fd_step, cfg.restarts, cfg.seed);

  const char* label = minxent ? "minxent" : "maxent";
  try {
    const MaxEntSolution s = minxent ? solve_minxent(*prior, cs, ab, cfg) : solve_maxent(n, cs, ab, cfg);
    log.debug("converged after {} iterations, {} restarts", s.report.iterations, s.report.restarts_used);
    print_solution(out, label, ab, s);
    return exit_ok;
  } catch (const NotConverged& e) {
    print_solution(out, label, ab, e.best());
    throw;
  }
}

int cmd_check(const Options& o, std::ostream& out, Log& log) {
  const std::uint64_t seed = o.seed.value_or(verify::default_seed);
  for (const auto& c : verify::acceptance_criteria()) {
    log.debug("running criterion {}", c.id);
    const verify::CriterionResult r = c.run(seed);
    out << fmt::format("[{}] {} {}: {}\n", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
    for (const auto& f : r.findings) out << fmt::format("  FINDING {}: {}\n", r.id, f);
    if (!r.passed) {
      log.error(fmt::format("criterion {} failed", r.id));
      return exit_check_failed;
    }
  }
  return exit_ok;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec, std::string_view flag) {
  std::vector<double> out;
  if (spec.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = spec.find(':', start);
      parts.push_back(parse_real(spec.substr(start, colon - start), flag));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw InvalidArgument(fmt::format("{}: range must be start:stop:step", flag));
    const double lo = parts[0];
    const double hi = parts[1];
    const double step = parts[2];
    if (!(step > 0.0) || hi < lo) throw InvalidArgument(fmt::format("{}: need step > 0 and stop >= start", flag));
    const double count = std::floor((hi - lo) / step + 1e-9) + 1.0;
    if (count > 1e6) throw InvalidArgument(fmt::format("{}: more than 1e6 grid points", flag));
    for (int i = 0; i < static_cast<int>(count); ++i) out.push_back(lo + i * step);
  } else {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = spec.find(',', start);
      out.push_back(parse_real(spec.substr(start, comma - start), flag));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  for (double v : out) {
    if (!(v > 0.0)) throw InvalidArgument(fmt::format("{}: grid values must be positive, got {}", flag, v));
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Log log(err);
  Options o;
  CLI::App app{"Logarithmic norm entropy: evaluation, figure data, MaxEnt/MinXEnt solvers, property checks", "lne"};
  app.require_subcommand(1);
  auto add_output = [&o](CLI::App* sub) { sub->add_option("--output", o.output, "File for the result, or - for stdout"); };

  auto* entropy = app.add_subcommand("entropy", "Evaluate an entropy of the file's weights");
  entropy->add_option("--input", o.input, "Problem file (JSON)")->required();
  entropy->add_option("--family", o.family, "shannon, renyi, tsallis, kapur, norm, aczel_daroczy, lne, min_entropy_scaled");
  entropy->add_option("--alpha", o.alpha, "Order alpha (overrides params.alpha)");
  entropy->add_option("--beta", o.beta, "Order beta (overrides params.beta)");
  add_output(entropy);

  auto* curve = app.add_subcommand("curve", "LNE of {p, 1-p} over a p grid, CSV");
  curve->add_option("--alpha", o.alpha, "Order alpha")->required();
  curve->add_option("--beta", o.beta, "Beta grid: list a,b,c or start:stop:step")->required();
  curve->add_option("--step", o.step, "p grid step in (0, 0.5]");
  add_output(curve);

  auto* surface = app.add_subcommand("surface", "LNE of Bin(n, p) over an (alpha, beta) grid, CSV");
  surface->add_option("--n", o.n, "Binomial trials")->required();
  surface->add_option("--p", o.p, "Success probability")->required();
  surface->add_option("--alpha", o.alpha, "Alpha grid")->required();
  surface->add_option("--beta", o.beta, "Beta grid")->required();
  add_output(surface);

  CLI::App* solvers[2];
  std::vector<CLI::Option*> seed_opts;
  std::vector<CLI::Option*> tol_opts;
  for (int k = 0; k < 2; ++k) {
    auto* sub = app.add_subcommand(k == 0 ? "maxent" : "minxent",
                                   k == 0 ? "Maximize the LNE under the file's constraints"
                                          : "Minimize the LNCE to the file's prior under its constraints");
    sub->add_option("--input", o.input, "Problem file (JSON)")->required();
    sub->add_option("--alpha", o.alpha, "Order alpha (overrides params.alpha)");
    sub->add_option("--beta", o.beta, "Order beta (overrides params.beta)");
    if (k == 0) sub->add_option("--n", o.n, "Number of states");
    seed_opts.push_back(sub->add_option("--seed", o.seed_flag, "Restart seed"));
    tol_opts.push_back(sub->add_option("--tol", o.tol_flag, "Residual tolerance"));
    add_output(sub);
    solvers[k] = sub;
  }

  auto* check = app.add_subcommand("check", "Run the acceptance criteria; stops at the first failure");
  seed_opts.push_back(check->add_option("--seed", o.seed_flag, "Seed for the random draws"));
  add_output(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    log.error(e.what());
    return exit_validation;
  }
  for (auto* opt : seed_opts) {
    if (opt->count() > 0) o.seed = o.seed_flag;
  }
  for (auto* opt : tol_opts) {
    if (opt->count() > 0) o.tol = o.tol_flag;
  }

  std::ostringstream buf;
  int code = exit_ok;
  try {
    if (entropy->parsed()) code = cmd_entropy(o, buf);
    if (curve->parsed()) code = cmd_curve(o, buf);
    if (surface->parsed()) code = cmd_surface(o, buf);
    if (solvers[0]->parsed()) code = cmd_solve(o, false, buf, log);
    if (solvers[1]->parsed()) code = cmd_solve(o, true, buf, log);
    if (check->parsed()) code = cmd_check(o, buf, log);
  } catch (const NotConverged& e) {
    log.error(e.what());
    code = exit_not_converged;
  } catch (const Infeasible& e) {
    log.error(e.what());
    code = exit_infeasible;
  } catch (const Error& e) {
    log.error(e.what());
    code = exit_validation;
  }

  if (o.output == "-") {
    out << buf.str();
  } else if (!buf.str().empty()) {
    std::ofstream file(o.output, std::ios::binary);
    file << buf.str();
    if (!file) {
      log.error(fmt::format("--output: cannot write '{}'", o.output));
      return exit_validation;
    }
  }
  return code;
}

}  // namespace lne::cli
