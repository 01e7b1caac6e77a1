#ifndef POCRF_SELFCHECK_HPP
#define POCRF_SELFCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pocrf/inside.hpp"

namespace pocrf {

struct CheckResult {
  std::string name;
  bool passed = true;
  long cases = 0;
  double worst = 0.0;  // largest observed error for the check's metric
  std::string detail;  // first failure, if any
};

struct SelfcheckConfig {
  int max_n = 6;
  int cases = 200;
  std::uint64_t seed = 0;
  std::vector<int> label_counts{2, 3, 4};
  InsideOptions options;  // options.flip_split_sign injects a DP fault
};

// Each check compares a dynamic program against the brute-force oracle (or
// a second independent route) on random instances.

// |inside - brute_force_log_z| <= 1e-8; `cases` charts per (n, |L|).
CheckResult check_partition(const SelfcheckConfig& config);
// masked_inside = vanilla = brute force within 1e-6 on random annotations.
CheckResult check_partial_scores(const SelfcheckConfig& config);
// Node-count and leaf/root identities, bounds, and agreement with the
// oracle's marginals (masked and unmasked).
CheckResult check_marginals(const SelfcheckConfig& config);
// cky_decode tree and score identical to brute_force_best_tree.
CheckResult check_decode(const SelfcheckConfig& config);
// Strict increase of the partial score along epsilon = 0, .01, .02, .1.
CheckResult check_smoothing(const SelfcheckConfig& config);
// Masks built from a full tree reproduce that tree's score within 1e-6,
// and no mask pushes the partial score above log Z + 1e-6.
CheckResult check_full_tree_and_bound(const SelfcheckConfig& config);
// Score gradients against central differences (step 1e-5, rel 1e-4), n <= 5.
CheckResult check_score_gradients(const SelfcheckConfig& config);
// Batched masked inside equals the per-sentence result, for 1 and 4 threads.
CheckResult check_batched(const SelfcheckConfig& config);

std::vector<CheckResult> run_selfcheck(const SelfcheckConfig& config);

}  // namespace pocrf

#endif  // POCRF_SELFCHECK_HPP
