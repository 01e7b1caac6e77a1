#ifndef POCRF_LABEL_SCHEMA_HPP
#define POCRF_LABEL_SCHEMA_HPP

#include <optional>
#include <string>
#include <vector>

namespace pocrf {

// Observed labels occupy indices [0, observed_count()), latent labels the
// remaining [observed_count(), size()).
class LabelSchema {
 public:
  LabelSchema() = default;
  LabelSchema(std::vector<std::string> observed, int latent_count = 1);

  int observed_count() const { return static_cast<int>(observed_.size()); }
  int latent_count() const { return latent_count_; }
  int size() const { return observed_count() + latent_count_; }

  bool is_observed(int label) const { return label >= 0 && label < observed_count(); }
  bool is_latent(int label) const { return label >= observed_count() && label < size(); }

  const std::vector<std::string>& observed_labels() const { return observed_; }
  std::optional<int> find(const std::string& name) const;
  // Observed labels by name; latent labels render as "#latent<i>".
  std::string name(int label) const;

  bool operator==(const LabelSchema&) const = default;

 private:
  std::vector<std::string> observed_;
  int latent_count_ = 1;
};

}  // namespace pocrf

#endif  // POCRF_LABEL_SCHEMA_HPP
