#pragma once

#include <cstdint>
#include <vector>

namespace fedrec {

/// Counter-based random stream (splitmix64 over key + counter).
///
/// The simulation's determinism contract hangs on this type: every logical
/// actor (client c in round r, the selector, the clusterer, ...) derives its
/// own substream, so draws are identical whether clients run sequentially or
/// on a worker pool. Output is pure 64-bit integer mixing and therefore
/// platform independent. Never share one stream across actors.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix64(seed ^ kKeySalt)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform in [0,1), 53-bit mantissa.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0,n). n must be > 0. Unbiased (modulo rejection).
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal via Box-Muller; consumes two draws per value.
  double next_normal();

  /// Zero-mean Laplace with the given scale (inverse-CDF). scale == 0 -> 0.
  double next_laplace(double scale);

  /// Independent stream derived from this stream's key and a tag. Any tag
  /// values may be used; distinct (key, tag) pairs give unrelated streams.
  /// Does not consume or disturb this stream's counter.
  RandomStream substream(std::uint64_t tag) const {
    RandomStream s(0);
    s.key_ = mix64(key_ ^ mix64(tag + kSubstreamSalt));
    s.counter_ = 0;
    return s;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kKeySalt = 0xD1B54A32D192ED03ull;
  static constexpr std::uint64_t kSubstreamSalt = 0x8CB92BA72F3D8DD7ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Keyed 64-bit hash over an id. This is the run-wide "encryption" stand-in
/// for the neighbor exchange: deterministic per (key, id) so hashes join
/// across clients, but it is NOT a cryptographic primitive and makes no
/// security claims beyond hiding ids from casual inspection.
std::uint64_t keyed_hash64(std::uint64_t key, std::uint64_t id);

/// k distinct values from [0,n), uniform without replacement (partial
/// Fisher-Yates). Result order is the selection order.
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k,
                                                      RandomStream& rng);

}  // namespace fedrec
