#ifndef POCRF_OPTIMIZER_HPP
#define POCRF_OPTIMIZER_HPP

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace pocrf {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled: theta -= lr * decay * theta
};

// Adaptive-moment optimizer over a fixed list of flat parameter arrays.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  long steps() const { return step_; }

  // params[a] and grads[a] are parallel arrays of equal length; the first
  // call fixes the layout.
  void step(const std::vector<Eigen::Map<Eigen::VectorXd>>& params,
            const std::vector<Eigen::Map<const Eigen::VectorXd>>& grads) {
    if (first_.empty()) {
      for (const auto& p : params) {
        first_.push_back(Eigen::VectorXd::Zero(p.size()));
        second_.push_back(Eigen::VectorXd::Zero(p.size()));
      }
    }
    ++step_;
    const double c1 = 1.0 - std::pow(config_.beta1, double(step_));
    const double c2 = 1.0 - std::pow(config_.beta2, double(step_));
    for (std::size_t a = 0; a < params.size(); ++a) {
      auto& m = first_[a];
      auto& v = second_[a];
      m = config_.beta1 * m + (1.0 - config_.beta1) * grads[a];
      v = config_.beta2 * v + (1.0 - config_.beta2) * grads[a].cwiseAbs2();
      Eigen::Map<Eigen::VectorXd> p = params[a];
      if (config_.weight_decay != 0.0) p -= config_.learning_rate * config_.weight_decay * p;
      p.array() -= config_.learning_rate * (m.array() / c1) /
                   ((v.array() / c2).sqrt() + config_.epsilon);
    }
  }

 private:
  AdamConfig config_;
  long step_ = 0;
  std::vector<Eigen::VectorXd> first_;
  std::vector<Eigen::VectorXd> second_;
};

}  // namespace pocrf

#endif  // POCRF_OPTIMIZER_HPP
