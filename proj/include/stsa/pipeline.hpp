#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stsa/order.hpp"
#include "stsa/pfsa.hpp"
#include "stsa/signal.hpp"

// End-to-end analysis driver: normalize, pick the downsampling lag from the
// autocorrelation function, downsample, partition, symbolize, estimate the
// memory, fit a model, and compute its metrics. The CLI subcommands call the
// same step functions, so running them one at a time writes byte-identical
// artifacts to a pipeline run.
namespace stsa {

inline constexpr double kDefaultSpectralEpsilon = 0.05;
inline constexpr int kSpectralDepthCap = 5;

struct PreprocessOutput {
  Signal transformed;       // normalized, then downsampled at the chosen lag
  std::size_t samples = 0;  // input length
  double mean = 0.0;        // input mean before normalization
  double stddev = 0.0;      // input standard deviation (divisor N)
  std::size_t max_lag = 0;
  std::size_t lag = 1;
  bool found_minimum = false;
};

// normalize + first autocorrelation minimum + downsample, with diagnostics.
PreprocessOutput preprocess_signal(const Signal& raw);
std::string preprocess_json(const PreprocessOutput& p);

struct OrderReport {
  OrderEstimate consistent;
  SpectralDepth spectral;
};

// Both memory estimates side by side; the spectral one works on the smoothed
// one-step symbol matrix (context length 1).
OrderReport analyze_order(const SymbolSeq& seq, const OrderParams& params,
                          double epsilon, int d_max = kSpectralDepthCap);
std::string order_report_json(const OrderReport& r);

// Depth to fit the model at: "spectral" (default), "consistent" (the order
// estimate, raised to 1 for order-0 sequences; fails when the estimator
// returned nothing), or "manual" (requires depth_override >= 1).
int resolve_depth(const std::string& source, std::optional<int> depth_override,
                  const OrderReport& report);

// Plot-ready rows (source_file, label, depth, d_M, discrepancy), RFC 4180
// with CRLF line ends, sorted by (source_file, label).
std::string metrics_csv(const std::vector<const DMarkovModel*>& models);

// Plot-ready gap curve: one row (k, delta_hat, threshold) per context length.
std::string delta_curve_csv(const OrderEstimate& est);

struct PipelineConfig {
  std::vector<std::string> inputs;  // literal paths and/or glob patterns
  std::string output_dir;
  int alphabet_size = 3;
  PartitionMethod partition_method = PartitionMethod::MaxEntropy;
  double gamma = 0.5;
  double beta = 0.2;
  int k_max = -1;  // -1: automatic
  int i_max = -1;  // -1: automatic
  double epsilon = kDefaultSpectralEpsilon;
  std::string depth_source = "spectral";  // spectral | consistent | manual
  std::optional<int> depth_override;
  bool global_partition = false;  // one partition fit on pooled samples
  bool fail_fast = false;
  int jobs = 1;

  void validate() const;
  // Strict schema: requires "config_version": 1, rejects unknown keys.
  static PipelineConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct FileReport {
  std::string input;
  std::string stem;  // artifact basename, disambiguated on collision
  bool ok = false;
  std::string error;
  std::size_t lag = 0;
  bool found_minimum = false;
  std::optional<int> consistent_order;
  int spectral_depth = 0;
  int depth_used = 0;
  double d_m = 0.0;
  double discrepancy = 0.0;
};

struct PipelineReport {
  std::vector<FileReport> files;  // sorted by input path
  std::string metrics_path;
  bool all_ok = false;
};

// Per input file writes <stem>.preprocessed.csv, <stem>.preprocess.json,
// <stem>.partition.json, <stem>.sym, <stem>.order.json, <stem>.model.json
// into output_dir, plus one shared metrics.csv. Per-file failures are
// collected in the report unless fail_fast is set.
PipelineReport run_pipeline(const PipelineConfig& config);

// Glob expansion (POSIX rules), deduplicated and sorted. Throws
// InvalidParams("no inputs matched") when nothing matches.
std::vector<std::string> expand_inputs(
    const std::vector<std::string>& patterns);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace stsa
