#ifndef POCRF_MODEL_IO_HPP
#define POCRF_MODEL_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "pocrf/scorer.hpp"

namespace pocrf {

// Model file layout, all integers little-endian:
//   8 bytes   magic "POCRFMDL"
//   u32       format version
//   u64       header length H
//   H bytes   JSON header: dim, hidden, observed_labels, latent_count,
//             vocab (index order), arrays [{name, size}] in payload order
//   payload   IEEE-754 float64 values, little-endian, arrays back to back in
//             the order embed, mix_w, mix_b, ff1_w, ff1_b, ff2_w, ff2_b,
//             bilinear[0..L), linear, bias (matrices column-major)
//   u64       FNV-1a 64 checksum over header and payload bytes
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const ScorerParams& params, std::ostream& out);
void save_model(const ScorerParams& params, const std::string& path);
ScorerParams load_model(std::istream& in);
ScorerParams load_model(const std::string& path);

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size, std::uint64_t seed);

}  // namespace pocrf

#endif  // POCRF_MODEL_IO_HPP
