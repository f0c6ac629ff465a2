#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fewnomial {

/// One invariant evaluated by the verification harness. The check passes
/// when `measured <= tolerance`.
struct CheckResult {
  std::string suite;
  std::string name;
  double measured;
  double tolerance;
  bool pass;
  std::string note;
};

struct VerifyOptions {
  std::vector<std::string> suites;  // empty runs every suite
  bool perturb = false;             // shift the analytic path to force failures
  std::uint64_t seed = 20240611;
  unsigned workers = 0;
};

const std::vector<std::string>& verify_suite_names();

/// Runs the selected suites; `on_result` is called as each check finishes.
/// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckResult> run_verify(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace fewnomial
