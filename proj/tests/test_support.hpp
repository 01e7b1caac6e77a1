#ifndef POCRF_TEST_SUPPORT_HPP
#define POCRF_TEST_SUPPORT_HPP

#include "pocrf/sampling.hpp"

namespace pocrf::testing {

using sampling::random_bracketing;
using sampling::random_chart;
using sampling::random_partial_tree;

inline LabelSchema schema_with(int observed, int latent) {
  return sampling::numbered_schema(observed, latent);
}

}  // namespace pocrf::testing

#endif  // POCRF_TEST_SUPPORT_HPP
