#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// Continuous-signal preparation: normalization, decorrelation-lag detection
// via the autocorrelation function, and phase-wise downsampling. These are
// the steps that turn a raw recording into the stationarized series handed
// to the partitioner.
namespace stsa {

struct Signal {
  std::vector<double> samples;
  std::optional<double> sample_rate_hz;
  std::string label;  // free-form tag, defaults to the file stem on ingestion
};

// Zero-mean, unit-variance copy (population standard deviation, divisor N).
// Throws DegenerateSignal for constant or near-empty input.
Signal normalize(const Signal& s);

struct AcfMinResult {
  std::size_t lag = 0;
  // False when no local minimum exists within [1, max_lag]; lag is then
  // max_lag itself and downstream steps should treat it as a fallback.
  bool found_minimum = false;
  // acf[l] for l = 0..last computed lag (biased estimator, acf[0] = 1).
  std::vector<double> acf;
};

// Smallest lag l >= 1 with acf(l) < acf(l-1) and acf(l) <= acf(l+1); for a
// plateau of equal values this is the plateau's first lag. The estimator is
// the biased one: acf(l) = (1/N) * sum (x_t - mean)(x_{t+l} - mean) / var,
// with acf(l) = 0 for l >= N.
AcfMinResult autocorr_first_min_lag(const Signal& s, std::size_t max_lag);

// Default search range: min(N/4, 1000), at least 1.
std::size_t default_max_lag(std::size_t n_samples);

// Concatenation of the lag phase subsequences s[p], s[p+lag], s[p+2*lag]...
// for p = 0..lag-1. A permutation of the input; lag 1 is the identity.
Signal downsample_concat(const Signal& s, std::size_t lag);

// Single-column CSV with an optional one-line header; accepts LF or CRLF.
// Rows that do not parse as finite numbers are a hard error. The signal's
// label is set to the file stem.
Signal read_signal_csv(const std::filesystem::path& path);

// Writes a "value" header plus one sample per row, CRLF line endings,
// shortest round-trip number formatting.
void write_signal_csv(const std::filesystem::path& path, const Signal& s);

// The exact bytes write_signal_csv emits.
std::string signal_csv_text(const Signal& s);

}  // namespace stsa
