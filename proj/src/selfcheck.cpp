#include "pocrf/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pocrf/batched.hpp"
#include "pocrf/decode.hpp"
#include "pocrf/marginals.hpp"
#include "pocrf/mask.hpp"
#include "pocrf/oracle.hpp"
#include "pocrf/sampling.hpp"
#include "pocrf/vanilla.hpp"

namespace pocrf {
namespace {

using sampling::numbered_schema;
using sampling::random_chart;
using sampling::random_partial_tree;

// Tracks the worst error and the first failure of one check.
class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }

  void observe(double error, double tolerance, const std::string& what) {
    ++result_.cases;
    if (!(error <= tolerance)) fail(what + " error " + fmt(error) + " > " + fmt(tolerance));
    if (std::isnan(error) || error > result_.worst) result_.worst = error;
  }
  void require(bool ok, const std::string& what) {
    ++result_.cases;
    if (!ok) fail(what);
  }
  CheckResult done() { return std::move(result_); }

  static std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
  }

 private:
  void fail(const std::string& what) {
    if (result_.passed) result_.detail = what;
    result_.passed = false;
  }
  CheckResult result_;
};

std::string where(int n, int labels, int c) {
  return "n=" + std::to_string(n) + " |L|=" + std::to_string(labels) + " case " + std::to_string(c);
}

// Observed/latent split for a label count >= 2, varying with the case.
LabelSchema schema_for(int labels, int c) {
  const int observed = 1 + c % (labels - 1);
  return numbered_schema(observed, labels - observed);
}

int label_count_for(const SelfcheckConfig& config, int c) {
  return config.label_counts[c % config.label_counts.size()];
}

}  // namespace

CheckResult check_partition(const SelfcheckConfig& config) {
  Tally t("partition function vs oracle");
  std::mt19937_64 rng(config.seed);
  for (int n = 1; n <= config.max_n; ++n)
    for (int labels : config.label_counts)
      for (int c = 0; c < config.cases; ++c) {
        const auto chart = random_chart(rng, n, labels);
        t.observe(std::abs(inside(chart, config.options) - oracle::brute_force_log_z(chart)), 1e-8,
                  where(n, labels, c));
      }
  return t.done();
}

CheckResult check_partial_scores(const SelfcheckConfig& config) {
  Tally t("masked inside = vanilla = oracle partial score");
  std::mt19937_64 rng(config.seed + 1);
  for (int c = 0; c < config.cases; ++c) {
    const int n = 1 + c % config.max_n;
    const int labels = label_count_for(config, c);
    const auto schema = schema_for(labels, c);
    const auto chart = random_chart(rng, n, labels);
    const auto symbols = classify_nodes(random_partial_tree(rng, n, schema, 0.2 + 0.1 * (c % 6)));
    const auto mask = build_mask(symbols, schema);
    const double reference = oracle::brute_force_partial_score(chart, symbols, schema);
    t.observe(std::abs(masked_inside(chart, mask, config.options) - reference), 1e-6,
              "masked " + where(n, labels, c));
    t.observe(std::abs(vanilla_partial_marginalization(chart, symbols, schema) - reference), 1e-6,
              "vanilla " + where(n, labels, c));
  }
  return t.done();
}

CheckResult check_marginals(const SelfcheckConfig& config) {
  Tally t("marginal identities and oracle marginals");
  std::mt19937_64 rng(config.seed + 2);
  for (int c = 0; c < config.cases; ++c) {
    const int n = 1 + c % config.max_n;
    const int labels = label_count_for(config, c);
    const auto schema = schema_for(labels, c);
    const auto chart = random_chart(rng, n, labels);
    const auto mu = marginals(chart, config.options);
    const std::string at = where(n, labels, c);

    double total = 0.0;
    double lo = 0.0, hi = 1.0;
    for_each_cell(n, [&](int i, int j) {
      total += mu.cell(i, j).sum();
      lo = std::min(lo, mu.cell(i, j).minCoeff());
      hi = std::max(hi, mu.cell(i, j).maxCoeff());
    });
    t.observe(std::abs(total - (2 * n - 1)), 1e-6, "node count " + at);
    for (int i = 0; i < n; ++i) t.observe(std::abs(mu.cell(i, i).sum() - 1.0), 1e-9, "leaf sum " + at);
    t.observe(std::abs(mu.cell(0, n - 1).sum() - 1.0), 1e-9, "root sum " + at);
    t.require(lo >= 0.0 && hi <= 1.0, "marginal outside [0,1] " + at);

    const auto symbols = classify_nodes(random_partial_tree(rng, n, schema));
    const auto mask = build_mask(symbols, schema);
    const auto ref = oracle::brute_force_marginals(chart);
    const auto mu_masked = marginals(chart, mask, config.options);
    const auto ref_masked = oracle::brute_force_marginals(chart, symbols, schema);
    double gap = 0.0;
    for_each_cell(n, [&](int i, int j) {
      gap = std::max(gap, (mu.cell(i, j) - ref.cell(i, j)).abs().maxCoeff());
      gap = std::max(gap, (mu_masked.cell(i, j) - ref_masked.cell(i, j)).abs().maxCoeff());
    });
    t.observe(gap, 1e-9, "oracle marginals " + at);
  }
  return t.done();
}

CheckResult check_decode(const SelfcheckConfig& config) {
  Tally t("CKY decode vs exhaustive best tree");
  std::mt19937_64 rng(config.seed + 3);
  for (int c = 0; c < config.cases; ++c) {
    const int n = 1 + c % config.max_n;
    const int labels = label_count_for(config, c);
    const auto chart = random_chart(rng, n, labels);
    const auto tree = cky_decode(chart);
    const auto ref = oracle::brute_force_best_tree(chart);
    t.require(is_valid_full_tree(tree), "malformed tree " + where(n, labels, c));
    t.require(tree == ref, "different tree " + where(n, labels, c));
    t.require(tree_score(chart, tree) == tree_score(chart, ref), "different score " + where(n, labels, c));
  }
  return t.done();
}

CheckResult check_smoothing(const SelfcheckConfig& config) {
  Tally t("structure smoothing strictly monotone");
  std::mt19937_64 rng(config.seed + 4);
  const double eps[] = {0.0, 0.01, 0.02, 0.1};
  int c = 0;
  for (int attempts = 0; c < config.cases && attempts < 100 * config.cases; ++attempts) {
    const int n = 3 + c % std::max(1, config.max_n - 2);
    const int labels = label_count_for(config, c);
    const auto schema = schema_for(labels, c);
    const auto symbols = classify_nodes(random_partial_tree(rng, n, schema, 0.5));
    bool any_rejected = false;
    for_each_cell(n, [&](int i, int j) { any_rejected |= symbols.kind(i, j) == NodeKind::rejected; });
    if (!any_rejected) continue;
    const auto chart = random_chart(rng, n, labels);
    const auto mask = build_mask(symbols, schema);
    double previous = masked_inside(chart, mask, config.options);
    t.require(masked_inside(chart, smooth_mask(mask, symbols, 0.0), config.options) == previous,
              "epsilon 0 differs from unsmoothed " + where(n, labels, c));
    for (int e = 1; e < 4; ++e) {
      const double v = masked_inside(chart, smooth_mask(mask, symbols, eps[e]), config.options);
      t.require(v - previous > 1e-9, "no strict increase at eps=" + Tally::fmt(eps[e]) + " " +
                                         where(n, labels, c));
      previous = v;
    }
    ++c;
  }
  return t.done();
}

CheckResult check_full_tree_and_bound(const SelfcheckConfig& config) {
  Tally t("full-tree masks evaluate the tree; partial score <= log Z");
  std::mt19937_64 rng(config.seed + 5);
  for (int c = 0; c < config.cases; ++c) {
    const int n = 1 + c % config.max_n;
    const int labels = label_count_for(config, c);
    const auto chart = random_chart(rng, n, labels);
    std::vector<std::pair<int, int>> spans;
    sampling::random_bracketing(rng, 0, n - 1, spans);
    std::uniform_int_distribution<int> pick(0, labels - 1);
    FullTree tree{n, {}};
    for (const auto& [i, j] : spans) tree.nodes.push_back(Span{i, j, pick(rng)});
    ChartMask mask(n, labels, 0.0);
    double direct = 0.0;
    for (const auto& s : tree.nodes) {
      mask(s.start, s.end, s.label) = 1.0;
      direct += chart(s.start, s.end, s.label);
    }
    t.observe(std::abs(masked_inside(chart, mask, config.options) - direct), 1e-6,
              "full tree " + where(n, labels, c));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    ChartMask fractional(n, labels, 0.0);
    for_each_cell(n, [&](int i, int j) {
      for (int k = 0; k < labels; ++k) fractional(i, j, k) = u(rng);
    });
    const double gap = masked_inside(chart, fractional, config.options) - inside(chart, config.options);
    t.observe(std::max(0.0, gap), 1e-6, "upper bound " + where(n, labels, c));
  }
  return t.done();
}

CheckResult check_score_gradients(const SelfcheckConfig& config) {
  Tally t("loss gradient vs central differences");
  std::mt19937_64 rng(config.seed + 6);
  const double h = 1e-5;
  const int cases = std::max(1, config.cases / 10);
  for (int c = 0; c < cases; ++c) {
    const int n = 1 + c % std::min(5, config.max_n);
    const int labels = label_count_for(config, c);
    const auto schema = schema_for(labels, c);
    auto chart = random_chart(rng, n, labels);
    const auto symbols = classify_nodes(random_partial_tree(rng, n, schema));
    const auto mask = smooth_mask(build_mask(symbols, schema), symbols, c % 2 ? 0.01 : 0.0);
    const auto lg = loss_and_score_gradient(chart, mask, config.options);
    double worst = 0.0;
    for_each_cell(n, [&](int i, int j) {
      for (int k = 0; k < labels; ++k) {
        const double saved = chart(i, j, k);
        chart(i, j, k) = saved + h;
        const double up = loss_and_score_gradient(chart, mask, config.options).loss;
        chart(i, j, k) = saved - h;
        const double down = loss_and_score_gradient(chart, mask, config.options).loss;
        chart(i, j, k) = saved;
        const double numeric = (up - down) / (2 * h);
        const double gap = std::abs(numeric - lg.grad(i, j, k));
        const double scale = std::max(std::abs(numeric), std::abs(lg.grad(i, j, k)));
        // Relative error; below 1e-4 in magnitude the 1e-8 absolute floor applies.
        worst = std::max(worst, gap / std::max(scale, 1e-4));
      }
    });
    t.observe(worst, 1e-4, where(n, labels, c));
  }
  return t.done();
}

CheckResult check_batched(const SelfcheckConfig& config) {
  Tally t("batched masked inside vs per-sentence");
  std::mt19937_64 rng(config.seed + 7);
  std::vector<ScoreChart> charts;
  std::vector<ChartMask> masks;
  const auto schema = numbered_schema(2, 2);
  for (int c = 0; c < std::max(1, config.cases / 4); ++c) {
    const int n = 1 + c % (2 * config.max_n);
    charts.push_back(random_chart(rng, n, schema.size()));
    const auto symbols = classify_nodes(random_partial_tree(rng, n, schema));
    masks.push_back(build_mask(symbols, schema));
  }
  for (int threads : {1, 4}) {
    const auto got = batched_masked_inside<double>(charts, masks, threads, config.options);
    for (std::size_t b = 0; b < charts.size(); ++b) {
      const double want = masked_inside(charts[b], masks[b]);
      t.observe(std::abs(got[b] - want), 0.0,
                "sentence " + std::to_string(b) + " threads " + std::to_string(threads));
    }
  }
  return t.done();
}

std::vector<CheckResult> run_selfcheck(const SelfcheckConfig& config) {
  return {check_partition(config),       check_partial_scores(config),
          check_marginals(config),       check_decode(config),
          check_smoothing(config),       check_full_tree_and_bound(config),
          check_score_gradients(config), check_batched(config)};
}

}  // namespace pocrf
