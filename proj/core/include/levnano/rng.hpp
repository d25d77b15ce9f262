#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levnano {

/// Seedable random stream with deterministic substreams.
///
/// Every independent noise source (axis, quadrature, measurement noise)
/// draws from its own substream so adding a source never perturbs the
/// numbers another one sees.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  RandomStream substream(std::uint64_t id) const;
  RandomStream substream(std::string_view label) const;

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace levnano
