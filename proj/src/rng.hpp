// Copyright 2026  imfdiag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IMFDIAG_RNG_HPP_
#define IMFDIAG_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace imfdiag {

// All randomness in the library flows through splitmix64: a 64-bit
// counter-based generator with a strong avalanche finalizer. Streams are
// cheap to derive, so every consumer (noise realization, shuffle, dropout
// mask, weight init) gets its own independent stream keyed on the user seed.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_ += kGoldenGamma); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from (seed, a, b). Used everywhere a
// sub-seed is needed: stage/realization noise, per-window decomposition,
// per-epoch shuffles, per-layer dropout masks.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
  std::uint64_t s = mix64(seed ^ (kGoldenGamma * (a + 1)));
  return mix64(s ^ (kGoldenGamma * (b + 1)));
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic i.i.d. N(0, std^2) stream: splitmix64 uniforms fed through
// the Box-Muller transform. Identical (length, std, stream_seed) inputs give
// bit-identical output on any platform with IEEE-754 doubles.
inline std::vector<double> gaussian_noise(std::size_t length, double std_dev,
                                          std::uint64_t stream_seed) {
  if (length < 1) throw InvalidArgument("gaussian_noise: length must be >= 1");
  if (!(std_dev > 0.0) || !std::isfinite(std_dev))
    throw InvalidArgument("gaussian_noise: std must be positive and finite");

  std::vector<double> out;
  out.reserve(length + 1);
  SplitMix64 rng(stream_seed);
  while (out.size() < length) {
    // u1 in (0,1] keeps log() finite; u2 in [0,1).
    const double u1 =
        static_cast<double>((rng.next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    out.push_back(std_dev * r * std::cos(a));
    if (out.size() < length) out.push_back(std_dev * r * std::sin(a));
  }
  return out;
}

}  // namespace imfdiag

#endif  // IMFDIAG_RNG_HPP_
