// Command-line driver for the symbolic time-series analysis pipeline.
// Exit codes: 0 success, 1 data/processing error, 2 usage error.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stsa/errors.hpp"
#include "stsa/metrics.hpp"
#include "stsa/order.hpp"
#include "stsa/partition.hpp"
#include "stsa/pfsa.hpp"
#include "stsa/pipeline.hpp"
#include "stsa/signal.hpp"
#include "stsa/synth.hpp"

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    stsa::write_text_file(out_path, text);
}

stsa::PartitionMethod parse_method(const std::string& name) {
  if (name == "max_entropy") return stsa::PartitionMethod::MaxEntropy;
  if (name == "uniform") return stsa::PartitionMethod::Uniform;
  throw stsa::InvalidParams(
      "method must be \"max_entropy\" or \"uniform\", got \"" + name + "\"");
}

struct OrderFlags {
  double gamma = 0.5;
  double beta = 0.2;
  int k_max = -1;
  int i_max = -1;
  double epsilon = stsa::kDefaultSpectralEpsilon;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma", gamma, "support threshold exponent, in (0,1)")
        ->capture_default_str();
    cmd->add_option("--beta", beta,
                    "decision threshold exponent, in (0,(1-gamma)/2)")
        ->capture_default_str();
    cmd->add_option("--k-max", k_max, "largest context length (-1: automatic)")
        ->capture_default_str();
    cmd->add_option("--i-max", i_max, "extension scan depth (-1: automatic)")
        ->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "spectral depth threshold, in (0,1)")
        ->capture_default_str();
  }

  stsa::OrderParams params() const {
    stsa::OrderParams p;
    p.gamma = gamma;
    p.beta = beta;
    p.k_max = k_max;
    p.i_max = i_max;
    return p;
  }
};

int run_preprocess(const std::string& input, const std::string& out,
                   const std::string& diagnostics) {
  const stsa::Signal raw = stsa::read_signal_csv(input);
  const stsa::PreprocessOutput pre = stsa::preprocess_signal(raw);
  emit(stsa::signal_csv_text(pre.transformed), out);
  if (!diagnostics.empty())
    stsa::write_text_file(diagnostics, stsa::preprocess_json(pre));
  return 0;
}

int run_partition(const std::vector<std::string>& inputs, int alphabet,
                  const std::string& method, const std::string& out) {
  stsa::Signal pooled;
  pooled.label = "pooled";
  for (const std::string& path : inputs) {
    const stsa::Signal s = stsa::read_signal_csv(path);
    pooled.samples.insert(pooled.samples.end(), s.samples.begin(),
                          s.samples.end());
  }
  const stsa::PartitionMethod m = parse_method(method);
  const stsa::PartitionSpec spec =
      m == stsa::PartitionMethod::MaxEntropy
          ? stsa::fit_max_entropy(pooled, alphabet)
          : stsa::fit_uniform(pooled, alphabet);
  emit(spec.to_json(), out);
  return 0;
}

int run_symbolize(const std::string& input, const std::string& partition,
                  const std::string& out) {
  const stsa::Signal s = stsa::read_signal_csv(input);
  const stsa::PartitionSpec spec = stsa::load_partition(partition);
  emit(stsa::symbols_text(stsa::symbolize(spec, s)), out);
  return 0;
}

int run_order(const std::string& input, const OrderFlags& flags,
              const std::string& out, const std::string& curve) {
  const stsa::SymbolSeq seq = stsa::read_symbols(input);
  const stsa::OrderReport report =
      stsa::analyze_order(seq, flags.params(), flags.epsilon);
  emit(stsa::order_report_json(report), out);
  if (!curve.empty())
    stsa::write_text_file(curve, stsa::delta_curve_csv(report.consistent));
  return 0;
}

int run_fit(const std::string& input, const OrderFlags& flags,
            std::optional<int> depth, const std::string& depth_source,
            const std::string& source_file, const std::string& label,
            const std::string& out) {
  const stsa::SymbolSeq seq = stsa::read_symbols(input);
  int resolved = 0;
  if (depth_source == "manual") {
    stsa::OrderReport unused;
    resolved = stsa::resolve_depth("manual", depth, unused);
  } else {
    const stsa::OrderReport report =
        stsa::analyze_order(seq, flags.params(), flags.epsilon);
    resolved = stsa::resolve_depth(depth_source, depth, report);
  }
  stsa::BuildOptions opts;
  opts.depth = resolved;
  stsa::DMarkovModel model = stsa::build_model(seq, opts);
  model.source_file = source_file;
  model.label = label;
  emit(model.to_json(), out);
  return 0;
}

int run_metrics(const std::vector<std::string>& inputs,
                const std::string& out) {
  std::vector<stsa::DMarkovModel> models;
  models.reserve(inputs.size());
  for (const std::string& path : inputs)
    models.push_back(stsa::DMarkovModel::from_json(stsa::read_text_file(path)));
  std::vector<const stsa::DMarkovModel*> ptrs;
  ptrs.reserve(models.size());
  for (const stsa::DMarkovModel& m : models) ptrs.push_back(&m);
  emit(stsa::metrics_csv(ptrs), out);
  return 0;
}

int run_simulate_chain(const std::string& spec_path, std::size_t n,
                       std::optional<std::uint64_t> seed,
                       const std::string& out) {
  stsa::ChainSpec spec =
      stsa::ChainSpec::from_json(stsa::read_text_file(spec_path));
  if (seed.has_value()) spec.seed = *seed;
  emit(stsa::symbols_text(stsa::simulate_chain(spec, n)), out);
  return 0;
}

int run_simulate_surrogate(bool stable, std::size_t n, std::uint64_t seed,
                           const std::string& out) {
  const stsa::Signal s =
      stable ? stsa::surrogate_stable(n, seed) : stsa::surrogate_unstable(n, seed);
  emit(stsa::signal_csv_text(s), out);
  return 0;
}

int run_pipeline_cmd(const std::string& config_path, const std::string& out_dir,
                     std::optional<int> jobs, bool fail_fast,
                     bool global_partition, const std::string& depth_source,
                     std::optional<int> depth) {
  stsa::PipelineConfig config =
      stsa::PipelineConfig::from_json(stsa::read_text_file(config_path));
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (jobs.has_value()) config.jobs = *jobs;
  if (fail_fast) config.fail_fast = true;
  if (global_partition) config.global_partition = true;
  if (!depth_source.empty()) config.depth_source = depth_source;
  if (depth.has_value()) {
    config.depth_override = *depth;
    if (depth_source.empty()) config.depth_source = "manual";
  }
  config.validate();

  const stsa::PipelineReport report = stsa::run_pipeline(config);
  for (const stsa::FileReport& f : report.files) {
    if (f.ok) {
      std::cout << "ok " << f.input << " lag=" << f.lag
                << " order=";
      if (f.consistent_order.has_value())
        std::cout << *f.consistent_order;
      else
        std::cout << "none";
      std::cout << " spectral=" << f.spectral_depth
                << " depth=" << f.depth_used << " d_M=" << f.d_m
                << " discrepancy=" << f.discrepancy << "\n";
    } else {
      std::cout << "error " << f.input << ": " << f.error << "\n";
    }
  }
  std::cout << "wrote " << report.metrics_path << "\n";
  return report.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic time-series analysis: partition continuous signals "
               "into symbol sequences, estimate their memory, fit finite-state "
               "models, and compare them."};
  app.require_subcommand(1);

  // preprocess
  std::string pre_input, pre_out, pre_diag;
  CLI::App* pre = app.add_subcommand(
      "preprocess", "Normalize, pick the downsampling lag, downsample");
  pre->add_option("input", pre_input, "signal CSV")->required();
  pre->add_option("--out", pre_out, "output CSV (default: stdout)");
  pre->add_option("--diagnostics", pre_diag, "also write diagnostics JSON");

  // partition
  std::vector<std::string> part_inputs;
  std::string part_method = "max_entropy", part_out;
  int part_alphabet = 3;
  CLI::App* part = app.add_subcommand(
      "partition", "Fit a partition over one or more signals");
  part->add_option("inputs", part_inputs, "signal CSVs (pooled)")->required();
  part->add_option("--alphabet", part_alphabet, "alphabet size")
      ->capture_default_str();
  part->add_option("--method", part_method, "max_entropy or uniform")
      ->capture_default_str();
  part->add_option("--out", part_out, "output JSON (default: stdout)");

  // symbolize
  std::string symb_input, symb_partition, symb_out;
  CLI::App* symb = app.add_subcommand(
      "symbolize", "Map a signal to symbols with a fitted partition");
  symb->add_option("input", symb_input, "signal CSV")->required();
  symb->add_option("--partition", symb_partition, "partition JSON")
      ->required();
  symb->add_option("--out", symb_out, "output symbol file (default: stdout)");

  // order
  std::string ord_input, ord_out, ord_curve;
  OrderFlags ord_flags;
  CLI::App* ord = app.add_subcommand(
      "order", "Estimate sequence memory (consistent and spectral)");
  ord->add_option("input", ord_input, "symbol file")->required();
  ord_flags.attach(ord);
  ord->add_option("--out", ord_out, "output JSON (default: stdout)");
  ord->add_option("--curve", ord_curve,
                  "also write the gap curve as CSV (k, delta_hat, threshold)");

  // fit
  std::string fit_input, fit_source = "", fit_label = "", fit_out;
  std::string fit_depth_source;
  int fit_depth = 0;
  OrderFlags fit_flags;
  CLI::App* fit = app.add_subcommand("fit", "Fit a fixed-depth model");
  fit->add_option("input", fit_input, "symbol file")->required();
  CLI::Option* fit_depth_opt =
      fit->add_option("--depth", fit_depth, "fit at this depth (implies "
                                            "--depth-source manual)");
  fit->add_option("--depth-source", fit_depth_source,
                  "spectral, consistent, or manual (default: spectral)");
  fit_flags.attach(fit);
  fit->add_option("--source-file", fit_source,
                  "source file recorded in the model");
  fit->add_option("--label", fit_label, "label recorded in the model");
  fit->add_option("--out", fit_out, "output JSON (default: stdout)");

  // metrics
  std::vector<std::string> met_inputs;
  std::string met_out;
  CLI::App* met =
      app.add_subcommand("metrics", "Metric rows for fitted models");
  met->add_option("models", met_inputs, "model JSON files")->required();
  met->add_option("--out", met_out, "output CSV (default: stdout)");

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "Generate synthetic data");
  sim->require_subcommand(1);
  std::string sim_spec, sim_chain_out;
  std::size_t sim_chain_n = 0;
  std::uint64_t sim_seed_value = 0;
  CLI::App* simc = sim->add_subcommand("chain", "Markov symbol chain");
  simc->add_option("--spec", sim_spec, "chain spec JSON")->required();
  simc->add_option("-n,--samples", sim_chain_n, "sequence length")->required();
  CLI::Option* simc_seed_opt =
      simc->add_option("--seed", sim_seed_value,
                       "override the seed given in --spec");
  simc->add_option("--out", sim_chain_out,
                   "output symbol file (default: stdout)");
  std::size_t sim_sur_n = 0;
  std::uint64_t sim_sur_seed = 0;
  std::string sim_stable_out, sim_unstable_out;
  CLI::App* sims = sim->add_subcommand("stable", "quiet surrogate signal");
  sims->add_option("-n,--samples", sim_sur_n, "sample count")->required();
  sims->add_option("--seed", sim_sur_seed, "generator seed")
      ->capture_default_str();
  sims->add_option("--out", sim_stable_out, "output CSV (default: stdout)");
  CLI::App* simu =
      sim->add_subcommand("unstable", "oscillatory surrogate signal");
  simu->add_option("-n,--samples", sim_sur_n, "sample count")->required();
  simu->add_option("--seed", sim_sur_seed, "generator seed")
      ->capture_default_str();
  simu->add_option("--out", sim_unstable_out, "output CSV (default: stdout)");

  // pipeline
  std::string pipe_config, pipe_out_dir, pipe_depth_source;
  int pipe_jobs = 0, pipe_depth = 0;
  bool pipe_fail_fast = false, pipe_global = false;
  CLI::App* pipe =
      app.add_subcommand("pipeline", "Run the full analysis over many files");
  pipe->add_option("--config", pipe_config, "pipeline config JSON")
      ->required();
  pipe->add_option("--out", pipe_out_dir, "override the output directory");
  CLI::Option* pipe_jobs_opt =
      pipe->add_option("--jobs", pipe_jobs, "parallel workers");
  pipe->add_flag("--fail-fast", pipe_fail_fast,
                 "stop scheduling after the first failure");
  pipe->add_flag("--global-partition", pipe_global,
                 "fit one partition over all inputs pooled");
  pipe->add_option("--depth-source", pipe_depth_source,
                   "spectral, consistent, or manual");
  CLI::Option* pipe_depth_opt =
      pipe->add_option("--depth", pipe_depth, "manual model depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Flag conflicts are usage errors, caught before any work starts.
  if (fit->parsed() && fit_depth_opt->count() > 0 &&
      !fit_depth_source.empty() && fit_depth_source != "manual") {
    std::cerr << "--depth conflicts with --depth-source " << fit_depth_source
              << "\n";
    return 2;
  }
  if (pipe->parsed() && pipe_depth_opt->count() > 0 &&
      !pipe_depth_source.empty() && pipe_depth_source != "manual") {
    std::cerr << "--depth conflicts with --depth-source " << pipe_depth_source
              << "\n";
    return 2;
  }

  try {
    if (pre->parsed()) return run_preprocess(pre_input, pre_out, pre_diag);
    if (part->parsed())
      return run_partition(part_inputs, part_alphabet, part_method, part_out);
    if (symb->parsed()) return run_symbolize(symb_input, symb_partition, symb_out);
    if (ord->parsed())
      return run_order(ord_input, ord_flags, ord_out, ord_curve);
    if (fit->parsed()) {
      std::optional<int> depth;
      std::string source = fit_depth_source;
      if (fit_depth_opt->count() > 0) {
        depth = fit_depth;
        if (source.empty()) source = "manual";
      }
      if (source.empty()) source = "spectral";
      return run_fit(fit_input, fit_flags, depth, source, fit_source,
                     fit_label, fit_out);
    }
    if (met->parsed()) return run_metrics(met_inputs, met_out);
    if (sim->parsed()) {
      if (simc->parsed()) {
        std::optional<std::uint64_t> seed;
        if (simc_seed_opt->count() > 0) seed = sim_seed_value;
        return run_simulate_chain(sim_spec, sim_chain_n, seed, sim_chain_out);
      }
      if (sims->parsed())
        return run_simulate_surrogate(true, sim_sur_n, sim_sur_seed,
                                      sim_stable_out);
      if (simu->parsed())
        return run_simulate_surrogate(false, sim_sur_n, sim_sur_seed,
                                      sim_unstable_out);
    }
    if (pipe->parsed()) {
      std::optional<int> jobs;
      if (pipe_jobs_opt->count() > 0) jobs = pipe_jobs;
      std::optional<int> depth;
      if (pipe_depth_opt->count() > 0) depth = pipe_depth;
      return run_pipeline_cmd(pipe_config, pipe_out_dir, jobs, pipe_fail_fast,
                              pipe_global, pipe_depth_source, depth);
    }
  } catch (const stsa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // no subcommand dispatched (unreachable with require_subcommand)
}
