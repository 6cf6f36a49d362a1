#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace cskit {

/// Counter-based 64-bit generator. Output n is a bijective mix of (key + n * gamma),
/// so independent substreams are obtained by deriving keys from (seed, ids...)
/// and results never depend on how work is scheduled across threads.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Stream tags, so different consumers of one seed never share draws.
namespace stream {
inline constexpr std::uint64_t kFrequencies = 0x46524551;  // "FREQ"
inline constexpr std::uint64_t kRestarts = 0x52535452;     // "RSTR"
inline constexpr std::uint64_t kLloyd = 0x4c4c4f59;        // "LLOY"
inline constexpr std::uint64_t kGmmRows = 0x474d4d52;      // "GMMR"
inline constexpr std::uint64_t kGmmSpec = 0x474d4d53;      // "GMMS"
}  // namespace stream

}  // namespace cskit
