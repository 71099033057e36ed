#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace godel {

/// Philox4x32-10 counter-based generator.
/// Key = base seed, counter words 2..3 = stream index, words 0..1 = block index.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static Block bijection(Block ctr, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t blocks_used() const { return block_; }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// Standard Gaussian draws from one Philox stream.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double operator()() { return normal_(engine_); }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace godel
