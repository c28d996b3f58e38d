#include "stsa/pipeline.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "stsa/errors.hpp"
#include "stsa/kernels.hpp"
#include "stsa/metrics.hpp"
#include "stsa/partition.hpp"
#include "textio.hpp"

namespace stsa {
namespace {

const char* method_name(PartitionMethod m) {
  return m == PartitionMethod::MaxEntropy ? "max_entropy" : "uniform";
}

PartitionMethod method_from_name(const std::string& s) {
  if (s == "max_entropy") return PartitionMethod::MaxEntropy;
  if (s == "uniform") return PartitionMethod::Uniform;
  throw InvalidSpec("partition_method must be \"max_entropy\" or \"uniform\"");
}

PartitionSpec fit_partition(PartitionMethod m, const Signal& s, int alphabet) {
  return m == PartitionMethod::MaxEntropy ? fit_max_entropy(s, alphabet)
                                          : fit_uniform(s, alphabet);
}

// Runs fn(i) for i in [0, n); with fail_fast no new work starts after the
// first failure. fn must only touch its own slot.
void run_parallel(std::size_t n, int jobs, bool fail_fast,
                  const std::function<bool(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      if (!fn(i) && fail_fast) return;
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (;;) {
      if (fail_fast && stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      if (!fn(i)) stop.store(true);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace

PreprocessOutput preprocess_signal(const Signal& raw) {
  PreprocessOutput out;
  out.samples = raw.samples.size();
  Signal normalized = normalize(raw);  // rejects degenerate input first
  const double n = static_cast<double>(out.samples);
  out.mean = kernels::sum(raw.samples) / n;
  out.stddev = std::sqrt(kernels::sumsq_centered(raw.samples, out.mean) / n);
  out.max_lag = default_max_lag(out.samples);
  AcfMinResult acf = autocorr_first_min_lag(normalized, out.max_lag);
  out.lag = acf.lag;
  out.found_minimum = acf.found_minimum;
  out.transformed = downsample_concat(normalized, out.lag);
  return out;
}

std::string preprocess_json(const PreprocessOutput& p) {
  nlohmann::ordered_json j;
  j["samples"] = p.samples;
  j["mean"] = p.mean;
  j["std"] = p.stddev;
  j["max_lag"] = p.max_lag;
  j["lag"] = p.lag;
  j["found_minimum"] = p.found_minimum;
  return j.dump(2) + "\n";
}

OrderReport analyze_order(const SymbolSeq& seq, const OrderParams& params,
                          double epsilon, int d_max) {
  OrderReport r;
  r.consistent = estimate_order(seq, params);
  const std::vector<std::int64_t> counts = count_transitions(seq, 1);
  const std::vector<double> one_step = map_emission(
      counts, static_cast<std::size_t>(seq.alphabet_size), seq.alphabet_size);
  r.spectral = spectral_depth(one_step, seq.alphabet_size, epsilon, d_max);
  return r;
}

std::string order_report_json(const OrderReport& r) {
  nlohmann::ordered_json j;
  j["consistent"] = nlohmann::ordered_json::parse(r.consistent.to_json());
  nlohmann::ordered_json sp;
  sp["depth"] = r.spectral.depth;
  sp["lambda2"] = r.spectral.lambda2;
  sp["epsilon"] = r.spectral.epsilon;
  sp["d_max"] = r.spectral.d_max;
  sp["non_mixing"] = r.spectral.non_mixing;
  sp["capped"] = r.spectral.capped;
  j["spectral"] = std::move(sp);
  return j.dump(2) + "\n";
}

int resolve_depth(const std::string& source, std::optional<int> depth_override,
                  const OrderReport& report) {
  if (source == "manual") {
    if (!depth_override.has_value())
      throw InvalidParams("manual depth selection requires a depth value");
    if (*depth_override < 1) throw InvalidParams("depth must be at least 1");
    return *depth_override;
  }
  if (source == "spectral") return report.spectral.depth;
  if (source == "consistent") {
    if (!report.consistent.order.has_value())
      throw InvalidParams(
          "order estimator did not settle on an order; "
          "pass an explicit depth or use the spectral depth");
    return std::max(1, *report.consistent.order);
  }
  throw InvalidParams(
      "depth source must be \"spectral\", \"consistent\", or \"manual\"");
}

std::string metrics_csv(const std::vector<const DMarkovModel*>& models) {
  std::vector<const DMarkovModel*> sorted = models;
  std::sort(sorted.begin(), sorted.end(),
            [](const DMarkovModel* a, const DMarkovModel* b) {
              if (a->source_file != b->source_file)
                return a->source_file < b->source_file;
              return a->label < b->label;
            });
  std::string out = "source_file,label,depth,d_M,discrepancy\r\n";
  for (const DMarkovModel* m : sorted) {
    out += detail::csv_field(m->source_file);
    out += ',';
    out += detail::csv_field(m->label);
    out += ',';
    out += detail::fmt_int(m->depth);
    out += ',';
    out += detail::fmt_double(model_complexity(*m));
    out += ',';
    out += detail::fmt_double(info_gain_discrepancy(*m));
    out += "\r\n";
  }
  return out;
}

std::string delta_curve_csv(const OrderEstimate& est) {
  std::string out = "k,delta_hat,threshold\r\n";
  for (std::size_t k = 0; k < est.delta_curve.size(); ++k) {
    out += detail::fmt_int(static_cast<long long>(k));
    out += ',';
    out += detail::fmt_double(est.delta_curve[k]);
    out += ',';
    out += detail::fmt_double(est.threshold);
    out += "\r\n";
  }
  return out;
}

void PipelineConfig::validate() const {
  if (inputs.empty()) throw InvalidSpec("inputs must not be empty");
  if (output_dir.empty()) throw InvalidSpec("output_dir must not be empty");
  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet)
    throw InvalidSpec("alphabet_size must lie in [2, 36]");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InvalidSpec("gamma must lie in (0, 1)");
  if (!(beta > 0.0 && 2.0 * beta + gamma < 1.0))
    throw InvalidSpec(
        "beta must satisfy 0 < beta < (1 - gamma)/2, i.e. 2*beta + gamma < 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidSpec("epsilon must lie in (0, 1)");
  if (depth_source != "spectral" && depth_source != "consistent" &&
      depth_source != "manual")
    throw InvalidSpec(
        "depth_source must be \"spectral\", \"consistent\", or \"manual\"");
  if (depth_source == "manual" && !depth_override.has_value())
    throw InvalidSpec("depth_source \"manual\" requires depth_override");
  if (depth_override.has_value() && *depth_override < 1)
    throw InvalidSpec("depth_override must be at least 1");
  if (jobs < 1) throw InvalidSpec("jobs must be at least 1");
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidSpec("config must be a JSON object");
  static const char* known[] = {
      "config_version", "inputs",       "output_dir",   "alphabet_size",
      "partition_method", "gamma",      "beta",         "k_max",
      "i_max",          "epsilon",      "depth_source", "depth_override",
      "global_partition", "fail_fast",  "jobs"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidSpec("unknown config key: " + key);
  }
  PipelineConfig c;
  try {
    if (!j.contains("config_version"))
      throw InvalidSpec("config_version is required");
    if (j.at("config_version").get<int>() != 1)
      throw InvalidSpec("unsupported config_version (expected 1)");
    if (!j.contains("inputs") || !j.contains("output_dir"))
      throw InvalidSpec("config requires inputs and output_dir");
    c.inputs = j.at("inputs").get<std::vector<std::string>>();
    c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("alphabet_size"))
      c.alphabet_size = j.at("alphabet_size").get<int>();
    if (j.contains("partition_method"))
      c.partition_method =
          method_from_name(j.at("partition_method").get<std::string>());
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("k_max")) c.k_max = j.at("k_max").get<int>();
    if (j.contains("i_max")) c.i_max = j.at("i_max").get<int>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("depth_source"))
      c.depth_source = j.at("depth_source").get<std::string>();
    if (j.contains("depth_override"))
      c.depth_override = j.at("depth_override").get<int>();
    if (j.contains("global_partition"))
      c.global_partition = j.at("global_partition").get<bool>();
    if (j.contains("fail_fast")) c.fail_fast = j.at("fail_fast").get<bool>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("malformed config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["config_version"] = 1;
  j["inputs"] = inputs;
  j["output_dir"] = output_dir;
  j["alphabet_size"] = alphabet_size;
  j["partition_method"] = method_name(partition_method);
  j["gamma"] = gamma;
  j["beta"] = beta;
  j["k_max"] = k_max;
  j["i_max"] = i_max;
  j["epsilon"] = epsilon;
  j["depth_source"] = depth_source;
  if (depth_override.has_value()) j["depth_override"] = *depth_override;
  j["global_partition"] = global_partition;
  j["fail_fast"] = fail_fast;
  j["jobs"] = jobs;
  return j.dump(2) + "\n";
}

std::vector<std::string> expand_inputs(
    const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const std::string& pattern : patterns) {
    ::glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i)
        out.emplace_back(g.gl_pathv[i]);
    } else if (rc != GLOB_NOMATCH) {
      ::globfree(&g);
      throw IoError("glob failed for pattern: " + pattern);
    }
    ::globfree(&g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw InvalidParams("no inputs matched");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

PipelineReport run_pipeline(const PipelineConfig& config) {
  config.validate();
  const std::vector<std::string> inputs = expand_inputs(config.inputs);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir);
  const std::filesystem::path out_dir(config.output_dir);

  PipelineReport report;
  report.files.resize(inputs.size());
  std::vector<Signal> transformed(inputs.size());
  std::vector<DMarkovModel> models(inputs.size());

  // Artifact basenames: input stem, suffixed on collision in sorted order.
  std::map<std::string, int> stem_uses;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    FileReport& f = report.files[i];
    f.input = inputs[i];
    std::string stem = std::filesystem::path(inputs[i]).stem().string();
    if (stem.empty()) stem = "input";
    const int n = ++stem_uses[stem];
    f.stem = n == 1 ? stem : stem + "_" + std::to_string(n);
  }

  auto fail = [](FileReport& f, const std::exception& e) {
    f.ok = false;
    f.error = e.what();
    return false;
  };

  // Phase 1: read, normalize, pick the lag, downsample.
  auto phase1 = [&](std::size_t i) {
    FileReport& f = report.files[i];
    try {
      const Signal raw = read_signal_csv(f.input);
      PreprocessOutput pre = preprocess_signal(raw);
      f.lag = pre.lag;
      f.found_minimum = pre.found_minimum;
      write_signal_csv(out_dir / (f.stem + ".preprocessed.csv"),
                       pre.transformed);
      write_text_file((out_dir / (f.stem + ".preprocess.json")).string(),
                      preprocess_json(pre));
      transformed[i] = std::move(pre.transformed);
      f.ok = true;  // provisional; phase 2 may still fail
      return true;
    } catch (const std::exception& e) {
      return fail(f, e);
    }
  };
  run_parallel(inputs.size(), config.jobs, config.fail_fast, phase1);

  // Optional single partition over the pooled preprocessed samples.
  PartitionSpec global_spec;
  bool have_global = false;
  if (config.global_partition) {
    Signal pooled;
    pooled.label = "pooled";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!report.files[i].ok) continue;
      pooled.samples.insert(pooled.samples.end(), transformed[i].samples.begin(),
                            transformed[i].samples.end());
    }
    if (!pooled.samples.empty()) {
      try {
        global_spec = fit_partition(config.partition_method, pooled,
                                    config.alphabet_size);
        have_global = true;
      } catch (const std::exception& e) {
        for (FileReport& f : report.files)
          if (f.ok) {
            f.ok = false;
            f.error = std::string("global partition failed: ") + e.what();
          }
      }
    }
  }

  // Phase 2: partition, symbolize, estimate, fit, measure.
  auto phase2 = [&](std::size_t i) {
    FileReport& f = report.files[i];
    if (!f.ok) return true;  // already failed upstream
    try {
      const Signal& sig = transformed[i];
      PartitionSpec spec;
      if (config.global_partition) {
        if (!have_global) throw InvalidParams("global partition unavailable");
        spec = global_spec;
      } else {
        spec = fit_partition(config.partition_method, sig,
                             config.alphabet_size);
      }
      write_text_file((out_dir / (f.stem + ".partition.json")).string(),
                      spec.to_json());
      const SymbolSeq sym = symbolize(spec, sig);
      write_symbols(out_dir / (f.stem + ".sym"), sym);

      OrderParams params;
      params.gamma = config.gamma;
      params.beta = config.beta;
      params.k_max = config.k_max;
      params.i_max = config.i_max;
      const OrderReport order = analyze_order(sym, params, config.epsilon);
      write_text_file((out_dir / (f.stem + ".order.json")).string(),
                      order_report_json(order));
      f.consistent_order = order.consistent.order;
      f.spectral_depth = order.spectral.depth;

      BuildOptions opts;
      opts.depth = resolve_depth(config.depth_source, config.depth_override,
                                 order);
      f.depth_used = opts.depth;
      DMarkovModel model = build_model(sym, opts);
      model.source_file = f.input;
      model.label = f.stem;
      write_text_file((out_dir / (f.stem + ".model.json")).string(),
                      model.to_json());
      f.d_m = model_complexity(model);
      f.discrepancy = info_gain_discrepancy(model);
      models[i] = std::move(model);
      return true;
    } catch (const std::exception& e) {
      return fail(f, e);
    }
  };
  run_parallel(inputs.size(), config.jobs, config.fail_fast, phase2);

  std::vector<const DMarkovModel*> ok_models;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (report.files[i].ok) ok_models.push_back(&models[i]);
  const std::filesystem::path metrics_path = out_dir / "metrics.csv";
  write_text_file(metrics_path.string(), metrics_csv(ok_models));
  report.metrics_path = metrics_path.string();

  report.all_ok = true;
  for (const FileReport& f : report.files) report.all_ok = report.all_ok && f.ok;
  return report;
}

}  // namespace stsa
