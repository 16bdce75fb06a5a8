// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace mtune {

// 2ab/(a+b); the headline base/novel aggregation metric.
double harmonic_mean(double a, double b);

// Deterministic child-seed derivation: FNV-1a over the master seed bytes
// and a canonical key string, finished with a splitmix64 mix.
std::uint64_t hash64(std::uint64_t master_seed, const std::string& key);

}  // namespace mtune
