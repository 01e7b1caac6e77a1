#include "pocrf/label_schema.hpp"

#include <unordered_set>

#include "pocrf/error.hpp"

namespace pocrf {

LabelSchema::LabelSchema(std::vector<std::string> observed, int latent_count)
    : observed_(std::move(observed)), latent_count_(latent_count) {
  if (observed_.empty())
    throw Error(ErrorCode::bad_config, "schema needs at least one observed label");
  if (latent_count_ < 1)
    throw Error(ErrorCode::bad_config, "schema needs at least one latent label");
  std::unordered_set<std::string> seen;
  for (const auto& name : observed_) {
    if (name.empty()) throw Error(ErrorCode::bad_config, "empty label name");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::bad_config, "duplicate label name '" + name + "'");
  }
}

std::optional<int> LabelSchema::find(const std::string& name) const {
  for (int k = 0; k < observed_count(); ++k)
    if (observed_[k] == name) return k;
  return std::nullopt;
}

std::string LabelSchema::name(int label) const {
  if (is_observed(label)) return observed_[label];
  return "#latent" + std::to_string(label - observed_count());
}

}  // namespace pocrf
