#include "pocrf/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <vector>

#include "pocrf/error.hpp"

namespace pocrf {
namespace {

constexpr char kMagic[8] = {'P', 'O', 'C', 'R', 'F', 'M', 'D', 'L'};
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) buf.push_back(static_cast<unsigned char>(value >> (8 * b)));
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) value |= static_cast<T>(p[b]) << (8 * b);
  return value;
}

}  // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

void save_model(const ScorerParams& params, std::ostream& out) {
  nlohmann::json header;
  header["dim"] = params.config.dim;
  header["hidden"] = params.config.hidden;
  header["observed_labels"] = params.schema.observed_labels();
  header["latent_count"] = params.schema.latent_count();
  header["vocab"] = params.vocab.tokens();
  header["arrays"] = nlohmann::json::array();
  std::vector<unsigned char> payload;
  params.weights.for_each_array([&](const char* name, const double* data, Eigen::Index size) {
    header["arrays"].push_back({{"name", name}, {"size", size}});
    for (Eigen::Index i = 0; i < size; ++i) put_le(payload, std::bit_cast<std::uint64_t>(data[i]));
  });
  const std::string header_text = header.dump();

  std::vector<unsigned char> buf(std::begin(kMagic), std::end(kMagic));
  put_le(buf, kModelFormatVersion);
  put_le(buf, static_cast<std::uint64_t>(header_text.size()));
  const std::size_t checked_from = buf.size();
  buf.insert(buf.end(), header_text.begin(), header_text.end());
  buf.insert(buf.end(), payload.begin(), payload.end());
  put_le(buf, fnv1a64(buf.data() + checked_from, buf.size() - checked_from, kFnvOffset));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::io, "failed to write model");
}

void save_model(const ScorerParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  save_model(params, out);
}

ScorerParams load_model(std::istream& in) {
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  if (buf.size() < 20 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw Error(ErrorCode::parse_error, "not a model file (bad magic)");
  const auto version = get_le<std::uint32_t>(buf.data() + 8);
  if (version != kModelFormatVersion)
    throw Error(ErrorCode::format_version, "model file has format version " + std::to_string(version) +
                                               ", this build reads version " +
                                               std::to_string(kModelFormatVersion));
  const auto header_len = get_le<std::uint64_t>(buf.data() + 12);
  const std::size_t header_at = 20;
  if (header_len > buf.size() - header_at - 8)
    throw Error(ErrorCode::parse_error, "truncated model header");
  const std::size_t payload_at = header_at + header_len;
  const std::size_t checksum_at = buf.size() - 8;
  if (fnv1a64(buf.data() + header_at, checksum_at - header_at, kFnvOffset) !=
      get_le<std::uint64_t>(buf.data() + checksum_at))
    throw Error(ErrorCode::parse_error, "model checksum mismatch");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(buf.begin() + header_at, buf.begin() + payload_at);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model header: ") + e.what());
  }

  ScorerParams params;
  try {
    ScorerConfig config{header.at("dim").get<int>(), header.at("hidden").get<int>()};
    LabelSchema schema(header.at("observed_labels").get<std::vector<std::string>>(),
                       header.at("latent_count").get<int>());
    auto tokens = header.at("vocab").get<std::vector<std::string>>();
    if (tokens.empty() || tokens.front() != Vocab::kUnknownToken)
      throw Error(ErrorCode::parse_error, "vocabulary must start with the unknown token");
    tokens.erase(tokens.begin());
    params = init_params(Vocab(tokens), std::move(schema), config, 0);
    const auto& arrays = header.at("arrays");
    std::size_t a = 0;
    std::size_t offset = payload_at;
    params.weights.for_each_array([&](const char* name, double* data, Eigen::Index size) {
      if (a >= arrays.size() || arrays[a].at("name").get<std::string>() != name ||
          arrays[a].at("size").get<Eigen::Index>() != size)
        throw Error(ErrorCode::parse_error, std::string("array layout mismatch at '") + name + "'");
      if (offset + std::size_t(size) * 8 > checksum_at)
        throw Error(ErrorCode::parse_error, "truncated model payload");
      for (Eigen::Index i = 0; i < size; ++i, offset += 8)
        data[i] = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + offset));
      ++a;
    });
    if (a != arrays.size() || offset != checksum_at)
      throw Error(ErrorCode::parse_error, "unexpected trailing arrays in model payload");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model header: ") + e.what());
  }
  return params;
}

ScorerParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open model '" + path + "'");
  return load_model(in);
}

}  // namespace pocrf
