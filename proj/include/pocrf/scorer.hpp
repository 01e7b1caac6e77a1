#ifndef POCRF_SCORER_HPP
#define POCRF_SCORER_HPP

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/label_schema.hpp"

namespace pocrf {

class Vocab {
 public:
  static constexpr int kUnknown = 0;
  static constexpr const char* kUnknownToken = "<unk>";

  Vocab();
  // Index 0 is reserved for unknown tokens; duplicates are ignored.
  explicit Vocab(const std::vector<std::string>& tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  int index(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct ScorerConfig {
  int dim = 32;     // embedding / mixer width d
  int hidden = 64;  // first feed-forward width h; the second is h / 2

  bool operator==(const ScorerConfig&) const = default;
};

// Every trainable array. Gradients use the same type.
struct ScorerWeights {
  Eigen::MatrixXd embed;  // |V| x d
  Eigen::MatrixXd mix_w;  // d x 3d, input is [E(x[i-1]); E(x[i]); E(x[i+1])]
  Eigen::VectorXd mix_b;
  Eigen::MatrixXd ff1_w;  // h x d
  Eigen::VectorXd ff1_b;
  Eigen::MatrixXd ff2_w;  // h/2 x h
  Eigen::VectorXd ff2_b;
  std::vector<Eigen::MatrixXd> bilinear;  // per label, h/2 x h/2
  Eigen::MatrixXd linear;                 // |L| x h/2, row k is U2_k
  Eigen::VectorXd bias;                   // |L|

  // Visits (name, contiguous storage) in the fixed serialization order.
  template <typename Fn>
  void for_each_array(Fn&& fn) {
    fn("embed", embed.data(), embed.size());
    fn("mix_w", mix_w.data(), mix_w.size());
    fn("mix_b", mix_b.data(), mix_b.size());
    fn("ff1_w", ff1_w.data(), ff1_w.size());
    fn("ff1_b", ff1_b.data(), ff1_b.size());
    fn("ff2_w", ff2_w.data(), ff2_w.size());
    fn("ff2_b", ff2_b.data(), ff2_b.size());
    for (std::size_t k = 0; k < bilinear.size(); ++k)
      fn("bilinear", bilinear[k].data(), bilinear[k].size());
    fn("linear", linear.data(), linear.size());
    fn("bias", bias.data(), bias.size());
  }
  template <typename Fn>
  void for_each_array(Fn&& fn) const {
    const_cast<ScorerWeights*>(this)->for_each_array(
        [&](const char* name, double* data, Eigen::Index size) {
          fn(name, static_cast<const double*>(data), size);
        });
  }

  Eigen::Index parameter_count() const;
  // Same shapes, all zero.
  ScorerWeights zeros_like() const;
  void set_zero();
  ScorerWeights& operator+=(const ScorerWeights& other);
  bool all_finite() const;
  bool operator==(const ScorerWeights& other) const;
};

struct ScorerParams {
  Vocab vocab;
  LabelSchema schema;
  ScorerConfig config;
  ScorerWeights weights;

  int half() const { return config.hidden / 2; }
};

// Closed form |V|d + (3d^2 + d) + (dh + h) + (h^2/2 + h/2) + |L|(h^2/4 + h/2 + 1).
Eigen::Index parameter_count(int vocab_size, const ScorerConfig& config, int label_count);

// Glorot-uniform arrays, zero biases. Deterministic in seed.
ScorerParams init_params(Vocab vocab, LabelSchema schema, ScorerConfig config, std::uint64_t seed);

// Intermediate activations kept for the backward pass; rows are tokens.
struct EncodeCache {
  std::vector<int> ids;
  Eigen::MatrixXd context;  // n x 3d
  Eigen::MatrixXd mix_pre;  // n x d
  Eigen::MatrixXd mix_out;
  Eigen::MatrixXd ff1_pre;  // n x h
  Eigen::MatrixXd ff1_out;
  Eigen::MatrixXd embeddings;  // n x h/2
};

// e_i = FF2(relu(FF1(relu(W_mix [E(x[i-1]); E(x[i]); E(x[i+1])] + b_mix)))),
// zero vectors past either sentence edge. Returns one row per token.
Eigen::MatrixXd encode(const std::vector<int>& ids, const ScorerParams& params,
                       EncodeCache* cache = nullptr);

// s(i, j, k) = e_i' U1_k e_j + (e_i + e_j)' U2_k + b_k on every cell i <= j.
ScoreChart biaffine_scores(const Eigen::MatrixXd& embeddings, const ScorerParams& params);

struct NormalizationStats {
  double mean = 0.0;
  double stddev = 1.0;
  bool scaled = true;  // false when stddev fell below the floor
};

inline constexpr double kStdFloor = 1e-8;

// Zero mean, unit population variance over all i <= j cells of one
// sentence. Below the std floor the chart is only mean-centered.
ScoreChart potential_normalize(const ScoreChart& chart, NormalizationStats* stats = nullptr);

// Maps a gradient on the normalized chart back to the raw chart.
ScoreChart potential_normalize_backward(const ScoreChart& normalized,
                                        const NormalizationStats& stats,
                                        const ScoreChart& grad_normalized);

struct ForwardPass {
  EncodeCache encoded;
  ScoreChart raw;
  ScoreChart normalized;
  NormalizationStats stats;
};

// encode -> biaffine -> potential_normalize.
ForwardPass forward(const std::vector<int>& ids, const ScorerParams& params);

// Gradients of every array given d loss / d normalized scores.
ScorerWeights backward(const ForwardPass& pass, const ScorerParams& params,
                       const ScoreChart& score_gradient);
ScorerWeights backward(const std::vector<int>& ids, const ScorerParams& params,
                       const ScoreChart& score_gradient);

}  // namespace pocrf

#endif  // POCRF_SCORER_HPP
