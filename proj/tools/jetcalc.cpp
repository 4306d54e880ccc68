// jetcalc: run scenario checks, list the catalog, evaluate expressions.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "jetcalc/jetcalc.hpp"

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int run(const std::string& path, const jetcalc::CheckOptions& opt, bool json, unsigned jobs) {
  jetcalc::Scenario scenario;
  try {
    scenario = jetcalc::load_scenario(path);
  } catch (const jetcalc::Error& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return 2;
  }
  const auto results = jetcalc::run_checks(scenario, opt, jobs);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.verdict == jetcalc::Verdict::Pass;

  if (json) {
    nlohmann::ordered_json report;
    report["scenario"] = path;
    report["seed"] = opt.seed;
    report["tolerance"] = opt.tol;
    auto& checks = report["checks"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      nlohmann::ordered_json c;
      c["name"] = r.name;
      c["verdict"] = jetcalc::to_string(r.verdict);
      c["residual"] = r.residual;
      c["max_numeric_residual"] = r.max_numeric ? nlohmann::ordered_json(*r.max_numeric) : nullptr;
      c["elapsed_ms"] = r.elapsed_ms;
      checks.push_back(std::move(c));
    }
    report["passed"] = ok;
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      std::cout << jetcalc::to_string(r.verdict) << "  " << r.name;
      if (r.max_numeric) std::cout << "  max|r|=" << format_double(*r.max_numeric);
      if (opt.timing) std::cout << "  " << format_double(r.elapsed_ms) << " ms";
      std::cout << "\n";
      if (r.verdict != jetcalc::Verdict::Pass) std::cout << "    residual: " << r.residual << "\n";
    }
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.verdict == jetcalc::Verdict::Pass;
    std::cout << passed << "/" << results.size() << " checks passed\n";
  }
  return ok ? 0 : 1;
}

int eval(const std::string& text, const std::string& at) {
  jetcalc::Expr e;
  try {
    e = jetcalc::parse_expr(text, true);
  } catch (const jetcalc::SyntaxError& err) {
    std::cerr << err.what() << "\n";
    return 2;
  }
  if (at.empty()) {
    std::cout << e << "\n";
    return 0;
  }
  jetcalc::ExactBindings exact;
  jetcalc::Bindings approx;
  bool all_exact = true;
  for (const auto& item : jetcalc::detail::split_list(at)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--at expects name=value pairs\n";
      return 2;
    }
    const std::string name = jetcalc::detail::trim(item.substr(0, eq));
    const std::string value = jetcalc::detail::trim(item.substr(eq + 1));
    try {
      const jetcalc::Expr v = jetcalc::parse_expr(value, true);
      if (auto c = v.constant()) {
        exact[name] = *c;
        approx[name] = c->get_d();
      } else {
        all_exact = false;
        approx[name] = v.eval({});
      }
    } catch (const jetcalc::Error& err) {
      std::cerr << "bad value for " << name << ": " << err.what() << "\n";
      return 2;
    }
  }
  try {
    if (all_exact) {
      try {
        std::cout << jetcalc::to_string(e.eval_exact(exact)) << "\n";
        return 0;
      } catch (const jetcalc::DomainError&) {
        // transcendental value; fall through to floating point
      }
    }
    std::printf("%.17g\n", e.eval(approx));
  } catch (const jetcalc::Error& err) {
    std::cerr << err.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic checks on composite fibred manifolds"};
  app.require_subcommand(1);

  jetcalc::CheckOptions opt;
  std::string path;
  bool json = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* run_cmd = app.add_subcommand("run", "Run the checks declared in a scenario file");
  run_cmd->add_option("file", path, "Scenario file")->required();
  run_cmd->add_option("--seed", opt.seed, "Seed for numeric sampling");
  run_cmd->add_option("--tol", opt.tol, "Tolerance for numeric sampling");
  run_cmd->add_flag("--json", json, "Emit a JSON report");
  run_cmd->add_option("--jobs", jobs, "Checks run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--timing", opt.timing, "Record per-check wall time");

  app.add_subcommand("checks", "List the check catalog");

  std::string text, at;
  auto* eval_cmd = app.add_subcommand("eval", "Normalize or evaluate an expression");
  eval_cmd->add_option("expr", text, "Expression")->required();
  eval_cmd->add_option("--at", at, "Comma-separated name=value bindings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run_cmd) return run(path, opt, json, jobs);
  if (*eval_cmd) return eval(text, at);
  for (const auto& name : jetcalc::check_catalog()) std::cout << name << "\n";
  return 0;
}
