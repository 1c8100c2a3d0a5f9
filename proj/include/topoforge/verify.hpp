#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topoforge {

/// Outcome of one self-check suite. Failures are JSON objects (as text)
/// holding everything needed to replay the failing case.
struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::vector<std::string> failures;
  /// Named summary numbers, in insertion order.
  std::vector<std::pair<std::string, double>> measures;

  bool passed() const { return failures.empty() && cases > 0; }
};

/// oracle, euler, stability, kernels, sampler.
const std::vector<std::string>& suite_names();

/// Throws Error on an unknown name. Deterministic in `seed`.
SuiteResult run_suite(std::string_view name, std::uint64_t seed);

/// The individual latent-stack checks that make up the kernels suite, one
/// result per check (KL value, KL and BCE gradients, oracle denoiser loss,
/// attention row sums, topology encoder permutation invariance).
std::vector<SuiteResult> kernel_checks(std::uint64_t seed);

/// Deterministic JSON summary (no timings) of a set of suite results.
std::string verify_report_json(const std::vector<SuiteResult>& results, std::uint64_t seed,
                               std::string_view config_hash);

/// Fixed-width text table, one row per suite.
std::string verify_table(const std::vector<SuiteResult>& results);

}  // namespace topoforge
