#include "stsa/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stsa/errors.hpp"
#include "stsa/kernels.hpp"
#include "textio.hpp"

namespace stsa {

Signal normalize(const Signal& s) {
  const auto& x = s.samples;
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateSignal("normalize: need at least 2 samples");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (*mn == *mx) throw DegenerateSignal("normalize: constant series");
  const double mean = kernels::sum(x) / static_cast<double>(n);
  const double var = kernels::sumsq_centered(x, mean) / static_cast<double>(n);
  if (!(var > 0.0)) throw DegenerateSignal("normalize: zero variance");
  Signal out;
  out.sample_rate_hz = s.sample_rate_hz;
  out.label = s.label;
  out.samples.resize(n);
  kernels::affine(x, out.samples, 1.0 / std::sqrt(var), mean);
  return out;
}

AcfMinResult autocorr_first_min_lag(const Signal& s, std::size_t max_lag) {
  const auto& x = s.samples;
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateSignal("autocorr: need at least 2 samples");
  if (max_lag < 1 || max_lag >= n)
    throw InvalidParams("autocorr: max_lag must be in [1, n-1]");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (*mn == *mx) throw DegenerateSignal("autocorr: constant series");

  const double mean = kernels::sum(x) / static_cast<double>(n);
  std::vector<double> y(n);
  kernels::affine(x, y, 1.0, mean);
  const double denom = kernels::dot(y, y);  // n * variance
  if (!(denom > 0.0)) throw DegenerateSignal("autocorr: zero variance");

  AcfMinResult res;
  res.acf.push_back(1.0);
  auto acf_at = [&](std::size_t l) -> double {
    if (l >= n) return 0.0;  // empty overlap under the biased estimator
    std::span<const double> head(y.data(), n - l);
    std::span<const double> tail(y.data() + l, n - l);
    return kernels::dot(head, tail) / denom;
  };
  // Lazy scan: deciding lag l needs acf at l+1, so stay one value ahead.
  for (std::size_t l = 1; l <= max_lag; ++l) {
    if (res.acf.size() <= l) res.acf.push_back(acf_at(l));
    if (res.acf.size() <= l + 1) res.acf.push_back(acf_at(l + 1));
    if (res.acf[l] < res.acf[l - 1] && res.acf[l] <= res.acf[l + 1]) {
      res.lag = l;
      res.found_minimum = true;
      return res;
    }
  }
  res.lag = max_lag;
  res.found_minimum = false;
  return res;
}

std::size_t default_max_lag(std::size_t n_samples) {
  std::size_t m = n_samples / 4;
  if (m > 1000) m = 1000;
  if (m < 1) m = 1;
  return m;
}

Signal downsample_concat(const Signal& s, std::size_t lag) {
  if (lag < 1) throw InvalidParams("downsample_concat: lag must be >= 1");
  const auto& x = s.samples;
  Signal out;
  out.sample_rate_hz = s.sample_rate_hz;
  out.label = s.label;
  out.samples.reserve(x.size());
  for (std::size_t p = 0; p < lag && p < x.size(); ++p)
    for (std::size_t t = p; t < x.size(); t += lag) out.samples.push_back(x[t]);
  return out;
}

Signal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw IoError(path.string() + ": empty file");

  Signal sig;
  sig.label = path.stem().string();
  std::size_t first = 0;
  double v = 0.0;
  if (!detail::parse_double(lines[0], v)) first = 1;  // header row
  if (first >= lines.size())
    throw IoError(path.string() + ": no samples after header");
  sig.samples.reserve(lines.size() - first);
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (!detail::parse_double(lines[i], v))
      throw IoError(path.string() + ": line " + detail::fmt_int((long long)i + 1) +
                    ": not a number: '" + lines[i] + "'");
    if (!std::isfinite(v))
      throw IoError(path.string() + ": line " + detail::fmt_int((long long)i + 1) +
                    ": non-finite value");
    sig.samples.push_back(v);
  }
  return sig;
}

std::string signal_csv_text(const Signal& s) {
  std::ostringstream buf;
  buf << "value\r\n";
  for (double v : s.samples) buf << detail::fmt_double(v) << "\r\n";
  return buf.str();
}

void write_signal_csv(const std::filesystem::path& path, const Signal& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << signal_csv_text(s);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stsa
