// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ABDUCT_COMMON_HPP
#define ABDUCT_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace abduct {

// Exit codes used by the CLI. Library code throws the matching exception
// type; the CLI maps it at the top level.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
  kExitVerify = 5,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VocabularyError : DataError {
  using DataError::DataError;
};

// splitmix64; used to derive independent child seeds so that parallel work
// (episodes, multi-seed runs) is schedule-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded RNG stream. All randomness in the library flows through one of
// these; a given seed fully determines every draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal(double mean = 0.0, double sigma = 1.0) {
    return mean + sigma * gauss_(engine_);
  }
  bool bernoulli(double p) { return unit_(engine_) < p; }
  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  int poisson(double lambda) {
    return std::poisson_distribution<int>(lambda)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

// Fixed-width multi-label target. Width is the action-vocabulary size and is
// constant across a run; synthetic worlds stay <= 16 but real vocabularies
// (e.g. 157 classes) need more than one word.
class ActionBitset {
 public:
  ActionBitset() = default;
  explicit ActionBitset(int width) : width_(width), words_((width + 63) / 64, 0) {}

  int width() const { return width_; }

  void set(int i) { words_[static_cast<std::size_t>(i) / 64] |= 1ULL << (i % 64); }
  void reset(int i) { words_[static_cast<std::size_t>(i) / 64] &= ~(1ULL << (i % 64)); }
  bool test(int i) const {
    return (words_[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1ULL;
  }

  int count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }
  bool empty() const { return count() == 0; }
  bool full() const { return count() == width_; }

  ActionBitset& operator|=(const ActionBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  bool is_subset_of(const ActionBitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool operator==(const ActionBitset& o) const {
    return width_ == o.width_ && words_ == o.words_;
  }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (int i = 0; i < width_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

 private:
  int width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace abduct

#endif  // ABDUCT_COMMON_HPP
