#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "shellpinn/bench/run.hpp"
#include "support/suites.hpp"

using namespace shellpinn;
using nlohmann::json;

namespace {

void print_error(const std::string& kind, const std::string& message, const std::string& key = {}) {
  json j{{"error", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << std::endl;
}

json l2_json(const L2Error& e) {
  json j;
  for (int i = 0; i < 5; ++i) j[kFieldNames[i]] = e.field[i];
  j["average"] = e.average;
  return j;
}

int cmd_solve(const std::string& path, bool verbose) {
  const RunConfig c = load_config(path);
  EpochHook hook;
  if (verbose) {
    hook = [](const TrainState& s) {
      json j{{"epoch", s.epoch}, {"loss", s.loss_history.back()}};
      if (!s.error_history.empty()) j["error"] = s.error_history.back();
      std::cerr << j.dump() << std::endl;
    };
  }
  const SolveResult r = run_solve(c, hook);
  json out{{"benchmark", c.benchmark},
           {"epochs", r.state.epoch},
           {"final_loss", r.report.loss_history.empty() ? 0.0 : r.report.loss_history.back()},
           {"l2_errors", r.report.l2_errors},
           {"probes", r.report.probes},
           {"wall_seconds", r.report.wall_seconds}};
  std::cout << out.dump() << std::endl;
  return 0;
}

int cmd_patch(const std::string& path) {
  const RunConfig c = load_config(path);
  const PatchResult r = patch_test(c);
  const bool ok = r.max_residual <= 1e-9 && r.max_resultant_error <= 1e-9;
  std::cout << json{{"benchmark", c.benchmark},
                    {"max_strong_residual", r.max_residual},
                    {"max_resultant_error", r.max_resultant_error},
                    {"pass", ok}}
                   .dump()
            << std::endl;
  return ok ? 0 : 1;
}

int cmd_topopt(const std::string& path, bool verbose) {
  const RunConfig c = load_config(path);
  OuterHook hook;
  if (verbose) {
    hook = [](const OuterRecord& o) {
      std::cerr << json{{"outer", o.iteration},     {"compliance", o.compliance},
                        {"volume", o.volume},       {"volume_residual", o.volume_residual},
                        {"equilibrium_inf", o.equilibrium_inf}, {"mu", o.mu},
                        {"feasible", o.feasible}}
                       .dump()
                << std::endl;
    };
  }
  const TopoptRunResult r = run_topopt(c, hook);
  const auto& last = r.result.history.back();
  std::cout << json{{"benchmark", c.benchmark},
                    {"converged", r.result.converged},
                    {"outer_iterations", last.iteration},
                    {"V0", r.V0},
                    {"volume", last.volume},
                    {"compliance", last.compliance},
                    {"equilibrium_inf", last.equilibrium_inf},
                    {"wall_seconds", r.result.wall_seconds}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_compare(const std::string& fields, const std::string& reference) {
  const FieldTable pred = ingest_reference(fields);
  const FieldTable ref = interpolate_to(ingest_reference(reference), pred);
  std::cout << json{{"l2_errors", l2_json(l2_error(pred, ref))}, {"points", pred.size()}}.dump() << std::endl;
  return 0;
}

int cmd_selftest() {
  if (setenv("SHELLPINN_THREADS", "1", 1) != 0) throw Error("io", "cannot set SHELLPINN_THREADS");
  const auto first = testing::run_suites();
  const auto second = testing::run_suites();
  bool ok = true;
  for (const auto& s : first) {
    ok = ok && s.pass;
    std::cout << json{{"suite", s.name},
                      {"pass", s.pass},
                      {"metric", s.metric},
                      {"threshold", s.threshold},
                      {"seconds", s.seconds}}
                     .dump()
              << std::endl;
  }
  const bool same = testing::bitwise_equal(first, second);
  std::cout << json{{"suite", "determinism"}, {"pass", same}}.dump() << std::endl;
  return ok && same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-free neural shell solver and thickness optimizer"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Per-epoch progress as JSON lines on stderr");

  std::string config, fields, reference;
  auto* solve = app.add_subcommand("solve", "Train a network for a configured benchmark");
  solve->add_option("config", config, "Flat YAML config file")->required();
  auto* patch = app.add_subcommand("patch", "Run the flat-plate patch test for a config");
  patch->add_option("config", config, "Flat YAML config file")->required();
  auto* topopt = app.add_subcommand("topopt", "Thickness topology optimization");
  topopt->add_option("config", config, "Flat YAML config file")->required();
  auto* compare = app.add_subcommand("compare", "Relative L2 errors of exported fields against a reference");
  compare->add_option("fields", fields, "Exported fields CSV")->required();
  compare->add_option("reference", reference, "Reference fields CSV")->required();
  app.add_subcommand("selftest", "Run the self-check suites twice in serial mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*solve) return cmd_solve(config, verbose);
    if (*patch) return cmd_patch(config);
    if (*topopt) return cmd_topopt(config, verbose);
    if (*compare) return cmd_compare(fields, reference);
    return cmd_selftest();
  } catch (const ConfigError& e) {
    print_error(e.kind(), e.what(), e.key());
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
  }
  return 1;
}
