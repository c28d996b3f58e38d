#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stsa/partition.hpp"
#include "stsa/signal.hpp"

// Synthetic processes with known structure, used to validate the estimators:
// finite-order Markov chains over small alphabets and two continuous
// surrogate classes with contrasting dynamics.
namespace stsa {

// Deterministic random source. The generator is std::mt19937_64 (the
// Mersenne Twister mt19937-64, fully specified by the standard); variates
// are derived here with fixed algorithms instead of the implementation-
// defined standard distributions so that streams are identical across
// platforms and library versions:
//   uniform01: (x >> 11) * 2^-53, uniform on [0, 1)
//   gaussian:  Marsaglia polar method, second variate cached
//   uniform_below: unbiased rejection sampling on the high bits
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian();

  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derive a per-stream seed from a base seed (splitmix64 finalizer); used to
// give batch members independent, reproducible streams.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// A Markov chain of the given order: conditionals holds |A|^order rows of
// |A| probabilities, rows indexed by the context packed most-significant-
// symbol-first (lexicographic context order).
struct ChainSpec {
  int order = 0;
  int alphabet_size = 2;
  std::vector<double> conditionals;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidSpec
  std::string to_json() const;
  static ChainSpec from_json(const std::string& text);
};

// n symbols drawn from the chain; the initial context is drawn uniformly.
// Deterministic given spec.seed.
SymbolSeq simulate_chain(const ChainSpec& spec, std::size_t n);

// Filtered Gaussian noise: a 3-tap boxcar average of white unit Gaussians
// (unit variance, autocorrelation vanishing past lag 2, unimodal amplitude
// density). Requires n >= 1000.
Signal surrogate_stable(std::size_t n, std::uint64_t seed);

// Sinusoid at 40 samples per cycle with amplitude 5, slow 5% amplitude
// jitter (AR(1), coefficient 0.995) and 10% additive Gaussian noise; the
// amplitude density is bimodal. RMS is at least 3x the stable surrogate.
Signal surrogate_unstable(std::size_t n, std::uint64_t seed);

struct ModeSummary {
  std::vector<int> peak_bins;  // significant local maxima of the histogram
  bool bimodal = false;
};

// Histogram-based modality check: counts are smoothed with a 3-tap mean,
// peaks below 15% of the maximum are ignored, and the sample is bimodal
// when two peaks are separated by a valley at most 0.8x the smaller peak.
ModeSummary histogram_modes(std::span<const double> samples, int nbins = 32);

}  // namespace stsa
