// SPDX-License-Identifier: Apache-2.0
#include "mtune/harness/metrics.hpp"

#include "mtune/errors.hpp"

namespace mtune {

double harmonic_mean(double a, double b) {
  if (a < 0.0 || b < 0.0) throw DomainError("harmonic_mean: inputs must be >= 0");
  if (a + b == 0.0) throw DomainError("harmonic_mean: both inputs zero");
  return 2.0 * a * b / (a + b);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t hash64(std::uint64_t master_seed, const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
  const auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;  // FNV prime
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(master_seed >> (8 * i)));
  for (char c : key) mix_byte(static_cast<unsigned char>(c));
  return splitmix64(h);
}

}  // namespace mtune
