#include "fedrec/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedrec {

std::uint64_t RandomStream::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be > 0");
  // reject the tail so every residue is equally likely
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RandomStream::next_normal() {
  // u1 in (0,1] keeps the log finite
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::next_laplace(double scale) {
  if (scale == 0.0) return 0.0;
  const double u = next_double() - 0.5;
  const double mag = std::abs(u);
  const double s = (u < 0.0) ? -1.0 : 1.0;
  return -scale * s * std::log1p(-2.0 * mag);
}

std::uint64_t keyed_hash64(std::uint64_t key, std::uint64_t id) {
  std::uint64_t z = id + 0x9E3779B97F4A7C15ull;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= key;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k,
                                                      RandomStream& rng) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.next_below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace fedrec
