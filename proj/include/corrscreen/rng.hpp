#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is drawn from a Philox4x32-10 stream
// whose 64-bit key is derived from the user seed and a list of tags (region
// pair, replicate index, purpose). Two streams with different tag lists are
// statistically independent, and the values drawn from a stream depend only
// on its key, never on thread scheduling.
//
// Normal variates use Box-Muller on 53-bit uniforms instead of
// std::normal_distribution so that output is identical across standard
// library implementations.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace corrscreen {

/// FNV-1a 64-bit hash, used to turn string tags (region ids) into stream tags.
std::uint64_t hash_string(std::string_view text) noexcept;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds `tags` into `seed`. Order matters: derive_key(s, {1, 2}) differs
/// from derive_key(s, {2, 1}).
std::uint64_t derive_key(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> tags) noexcept;

/// One Philox4x32-10 block: 10 rounds over a 128-bit counter and 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class RandomStream {
 public:
  using result_type = std::uint32_t;

  explicit RandomStream(std::uint64_t key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return 0xffffffffu; }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() noexcept;

  /// Standard normal variate.
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace corrscreen
