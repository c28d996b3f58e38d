#include "stsa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "stsa/errors.hpp"

namespace stsa {

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw InvalidParams("uniform_below: n must be positive");
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t checked_context_count(int alphabet_size, int order) {
  std::uint64_t count = 1;
  for (int i = 0; i < order; ++i) {
    if (count > (std::uint64_t{1} << 20) / static_cast<std::uint64_t>(alphabet_size))
      throw InvalidSpec("chain: alphabet_size^order too large");
    count *= static_cast<std::uint64_t>(alphabet_size);
  }
  return count;
}

}  // namespace

void ChainSpec::validate() const {
  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet)
    throw InvalidSpec("chain: alphabet_size must be in [2, 36]");
  if (order < 0) throw InvalidSpec("chain: order must be >= 0");
  const std::uint64_t contexts = checked_context_count(alphabet_size, order);
  const std::uint64_t a = static_cast<std::uint64_t>(alphabet_size);
  if (conditionals.size() != contexts * a)
    throw InvalidSpec("chain: conditionals must hold alphabet_size^order rows");
  for (std::uint64_t r = 0; r < contexts; ++r) {
    double row_sum = 0.0;
    for (std::uint64_t c = 0; c < a; ++c) {
      const double p = conditionals[r * a + c];
      if (!(p >= 0.0) || p > 1.0)
        throw InvalidSpec("chain: probabilities must lie in [0, 1]");
      row_sum += p;
    }
    if (std::fabs(row_sum - 1.0) > 1e-12)
      throw InvalidSpec("chain: row does not sum to 1 within 1e-12");
  }
}

SymbolSeq simulate_chain(const ChainSpec& spec, std::size_t n) {
  spec.validate();
  if (n < static_cast<std::size_t>(spec.order) + 1)
    throw InvalidParams("simulate_chain: n must be at least order+1");
  const std::uint64_t a = static_cast<std::uint64_t>(spec.alphabet_size);
  const std::uint64_t contexts = checked_context_count(spec.alphabet_size, spec.order);
  // ctx_mod removes the oldest symbol: ctx' = (ctx % a^(order-1)) * a + next.
  const std::uint64_t ctx_mod = spec.order > 0 ? contexts / a : 1;

  Rng rng(spec.seed);
  std::uint64_t ctx = rng.uniform_below(contexts);
  SymbolSeq seq;
  seq.alphabet_size = spec.alphabet_size;
  seq.symbols.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = rng.uniform01();
    const double* row = spec.conditionals.data() + ctx * a;
    double cum = 0.0;
    std::uint64_t sym = a - 1;  // final cell absorbs rounding remainder
    for (std::uint64_t c = 0; c < a; ++c) {
      cum += row[c];
      if (u < cum) {
        sym = c;
        break;
      }
    }
    seq.symbols.push_back(static_cast<std::uint8_t>(sym));
    if (spec.order > 0) ctx = (ctx % ctx_mod) * a + sym;
  }
  return seq;
}

Signal surrogate_stable(std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw InvalidParams("surrogate_stable: n must be >= 1000");
  Rng rng(seed);
  Signal sig;
  sig.label = "stable";
  sig.samples.reserve(n);
  const double norm = 1.0 / std::sqrt(3.0);
  double e2 = rng.gaussian();
  double e1 = rng.gaussian();
  for (std::size_t t = 0; t < n; ++t) {
    const double e0 = rng.gaussian();
    sig.samples.push_back((e0 + e1 + e2) * norm);
    e2 = e1;
    e1 = e0;
  }
  return sig;
}

Signal surrogate_unstable(std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw InvalidParams("surrogate_unstable: n must be >= 1000");
  Rng rng(seed);
  Signal sig;
  sig.label = "unstable";
  sig.samples.reserve(n);
  constexpr double kAmplitude = 5.0;
  constexpr double kSamplesPerCycle = 40.0;
  constexpr double kJitter = 0.05;   // slow relative amplitude wander
  constexpr double kNoise = 0.10;    // additive noise relative to amplitude
  constexpr double kRho = 0.995;     // AR(1) coefficient of the jitter
  const double omega = 2.0 * std::numbers::pi / kSamplesPerCycle;
  const double phase = 2.0 * std::numbers::pi * rng.uniform01();
  const double drive = std::sqrt(1.0 - kRho * kRho);
  double z = rng.gaussian();  // stationary start for the jitter process
  for (std::size_t t = 0; t < n; ++t) {
    z = kRho * z + drive * rng.gaussian();
    const double amp = kAmplitude * (1.0 + kJitter * z);
    const double value = amp * std::sin(omega * static_cast<double>(t) + phase) +
                         kNoise * kAmplitude * rng.gaussian();
    sig.samples.push_back(value);
  }
  return sig;
}

ModeSummary histogram_modes(std::span<const double> samples, int nbins) {
  if (nbins < 3) throw InvalidParams("histogram_modes: need at least 3 bins");
  if (samples.empty()) throw InvalidParams("histogram_modes: empty sample");
  const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  ModeSummary out;
  if (!(mx > mn)) {
    out.peak_bins.push_back(0);
    return out;
  }
  std::vector<double> hist(static_cast<std::size_t>(nbins), 0.0);
  const double scale = static_cast<double>(nbins) / (mx - mn);
  for (double v : samples) {
    auto b = static_cast<std::size_t>((v - mn) * scale);
    if (b >= hist.size()) b = hist.size() - 1;
    hist[b] += 1.0;
  }
  // 3-tap smoothing with zero padding outside the range.
  std::vector<double> smooth(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double l = i > 0 ? hist[i - 1] : 0.0;
    const double r = i + 1 < hist.size() ? hist[i + 1] : 0.0;
    smooth[i] = (l + hist[i] + r) / 3.0;
  }
  const double peak_floor = 0.15 * *std::max_element(smooth.begin(), smooth.end());
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    const double l = i > 0 ? smooth[i - 1] : -1.0;
    const double r = i + 1 < smooth.size() ? smooth[i + 1] : -1.0;
    if (smooth[i] > l && smooth[i] >= r && smooth[i] >= peak_floor)
      out.peak_bins.push_back(static_cast<int>(i));
  }
  for (std::size_t p = 0; p + 1 < out.peak_bins.size() && !out.bimodal; ++p) {
    for (std::size_t q = p + 1; q < out.peak_bins.size() && !out.bimodal; ++q) {
      const int i = out.peak_bins[p];
      const int j = out.peak_bins[q];
      double valley = smooth[static_cast<std::size_t>(i)];
      for (int b = i; b <= j; ++b)
        valley = std::min(valley, smooth[static_cast<std::size_t>(b)]);
      const double smaller = std::min(smooth[static_cast<std::size_t>(i)],
                                      smooth[static_cast<std::size_t>(j)]);
      if (valley <= 0.8 * smaller) out.bimodal = true;
    }
  }
  return out;
}

std::string ChainSpec::to_json() const {
  validate();
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  nlohmann::ordered_json j;
  j["order"] = order;
  j["alphabet_size"] = alphabet_size;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < conditionals.size() / a; ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < a; ++c) row.push_back(conditionals[r * a + c]);
    rows.push_back(std::move(row));
  }
  j["conditionals"] = std::move(rows);
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

ChainSpec ChainSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("chain JSON parse error: ") + e.what());
  }
  ChainSpec spec;
  try {
    spec.order = j.at("order").get<int>();
    spec.alphabet_size = j.at("alphabet_size").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& row : j.at("conditionals")) {
      const auto values = row.get<std::vector<double>>();
      spec.conditionals.insert(spec.conditionals.end(), values.begin(), values.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("chain JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace stsa
