#include "stsa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stsa/errors.hpp"
#include "stsa/kernels.hpp"
#include "textio.hpp"

namespace stsa {

namespace {

void check_alphabet(int a) {
  if (a < 2 || a > kMaxAlphabet)
    throw InvalidParams("alphabet_size must be in [2, 36]");
}

const char* method_name(PartitionMethod m) {
  return m == PartitionMethod::MaxEntropy ? "max_entropy" : "uniform";
}

PartitionMethod method_from_name(const std::string& name) {
  if (name == "max_entropy") return PartitionMethod::MaxEntropy;
  if (name == "uniform") return PartitionMethod::Uniform;
  throw InvalidSpec("unknown partition method: " + name);
}

}  // namespace

void PartitionSpec::validate() const {
  check_alphabet(alphabet_size);
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  if (boundaries.size() != a - 1)
    throw InvalidSpec("partition: expected alphabet_size-1 boundaries");
  if (centroids.size() != a)
    throw InvalidSpec("partition: expected alphabet_size centroids");
  for (double b : boundaries)
    if (!std::isfinite(b)) throw InvalidSpec("partition: non-finite boundary");
  for (double c : centroids)
    if (!std::isfinite(c)) throw InvalidSpec("partition: non-finite centroid");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i - 1] < boundaries[i]))
      throw InvalidSpec("partition: boundaries not strictly increasing");
  for (std::size_t i = 0; i < a; ++i) {
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity()
                             : boundaries[i - 1];
    const double hi = i + 1 == a ? std::numeric_limits<double>::infinity()
                                 : boundaries[i];
    if (centroids[i] < lo || centroids[i] > hi)
      throw InvalidSpec("partition: centroid outside its cell");
  }
}

PartitionSpec fit_max_entropy(const Signal& s, int alphabet_size) {
  check_alphabet(alphabet_size);
  const std::size_t n = s.samples.size();
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  if (n < a)
    throw InvalidParams("fit_max_entropy: need at least alphabet_size samples");

  std::vector<double> sorted = s.samples;
  std::sort(sorted.begin(), sorted.end());

  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i)
    if (sorted[i] != sorted[i - 1]) ++distinct;
  if (distinct < a)
    throw TooFewDistinctValues("fit_max_entropy: fewer distinct values than cells");

  PartitionSpec spec;
  spec.method = PartitionMethod::MaxEntropy;
  spec.alphabet_size = alphabet_size;
  spec.boundaries.reserve(a - 1);
  for (std::size_t k = 1; k < a; ++k) {
    const std::size_t m = n * k / a;  // floor of the quantile level N*k/A
    spec.boundaries.push_back(0.5 * (sorted[m - 1] + sorted[m]));
  }
  for (std::size_t i = 1; i < spec.boundaries.size(); ++i)
    if (!(spec.boundaries[i - 1] < spec.boundaries[i]))
      throw TooFewDistinctValues("fit_max_entropy: ties collapse a cell");

  // Per-cell means over the sorted data; ties at a boundary belong to the
  // lower cell, so a cell's range is (b[i-1], b[i]].
  spec.centroids.assign(a, 0.0);
  std::size_t begin = 0;
  for (std::size_t i = 0; i < a; ++i) {
    std::size_t end = n;
    if (i + 1 < a) {
      end = static_cast<std::size_t>(
          std::upper_bound(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                           sorted.end(), spec.boundaries[i]) -
          sorted.begin());
    }
    if (end == begin)
      throw TooFewDistinctValues("fit_max_entropy: empty cell after tie handling");
    std::span<const double> cell(sorted.data() + begin, end - begin);
    spec.centroids[i] = kernels::sum(cell) / static_cast<double>(cell.size());
    begin = end;
  }
  spec.validate();
  return spec;
}

PartitionSpec fit_uniform(const Signal& s, int alphabet_size) {
  check_alphabet(alphabet_size);
  const std::size_t n = s.samples.size();
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  if (n < a)
    throw InvalidParams("fit_uniform: need at least alphabet_size samples");
  const auto [mn_it, mx_it] = std::minmax_element(s.samples.begin(), s.samples.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  if (!(mx > mn)) throw DegenerateSignal("fit_uniform: constant series");

  PartitionSpec spec;
  spec.method = PartitionMethod::Uniform;
  spec.alphabet_size = alphabet_size;
  const double width = (mx - mn) / static_cast<double>(a);
  for (std::size_t i = 1; i < a; ++i)
    spec.boundaries.push_back(mn + width * static_cast<double>(i));
  for (std::size_t i = 0; i < a; ++i)
    spec.centroids.push_back(mn + width * (static_cast<double>(i) + 0.5));
  spec.validate();
  return spec;
}

SymbolSeq symbolize(const PartitionSpec& spec, const Signal& s) {
  spec.validate();
  SymbolSeq seq;
  seq.alphabet_size = spec.alphabet_size;
  seq.symbols.resize(s.samples.size());
  kernels::classify_bins(s.samples, spec.boundaries, seq.symbols);
  return seq;
}

double reconstruction_error(const PartitionSpec& spec, const Signal& s) {
  if (s.samples.empty())
    throw InvalidParams("reconstruction_error: empty signal");
  const SymbolSeq seq = symbolize(spec, s);
  std::vector<double> recon(s.samples.size());
  for (std::size_t i = 0; i < recon.size(); ++i)
    recon[i] = spec.centroids[seq.symbols[i]];
  return kernels::abs_diff_sum(recon, s.samples) /
         static_cast<double>(s.samples.size());
}

char symbol_char(int value) {
  if (value < 0 || value >= kMaxAlphabet)
    throw InvalidParams("symbol value out of range");
  return value < 10 ? static_cast<char>('0' + value)
                    : static_cast<char>('a' + value - 10);
}

int symbol_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  throw InvalidSpec(std::string("invalid symbol character: '") + c + "'");
}

std::string symbols_text(const SymbolSeq& seq) {
  check_alphabet(seq.alphabet_size);
  std::ostringstream buf;
  buf << "#alphabet=" << seq.alphabet_size << "\n";
  for (std::uint8_t v : seq.symbols) buf << symbol_char(v) << "\n";
  return buf.str();
}

void write_symbols(const std::filesystem::path& path, const SymbolSeq& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << symbols_text(seq);
  if (!out) throw IoError("write failed: " + path.string());
}

SymbolSeq read_symbols(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string prefix = "#alphabet=";
  if (line.rfind(prefix, 0) != 0)
    throw InvalidSpec(path.string() + ": missing #alphabet=K header");
  int a = 0;
  try {
    a = std::stoi(line.substr(prefix.size()));
  } catch (const std::exception&) {
    throw InvalidSpec(path.string() + ": bad alphabet header");
  }
  check_alphabet(a);

  SymbolSeq seq;
  seq.alphabet_size = a;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // tolerate a trailing blank line
    if (line.size() != 1)
      throw InvalidSpec(path.string() + ": expected one symbol per line");
    const int v = symbol_value(line[0]);
    if (v >= a)
      throw InvalidSpec(path.string() + ": symbol outside alphabet");
    seq.symbols.push_back(static_cast<std::uint8_t>(v));
  }
  return seq;
}

std::string PartitionSpec::to_json() const {
  validate();
  nlohmann::ordered_json j;
  j["method"] = method_name(method);
  j["alphabet_size"] = alphabet_size;
  j["boundaries"] = boundaries;
  j["centroids"] = centroids;
  return j.dump(2) + "\n";
}

PartitionSpec PartitionSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("partition JSON parse error: ") + e.what());
  }
  PartitionSpec spec;
  try {
    spec.method = method_from_name(j.at("method").get<std::string>());
    spec.alphabet_size = j.at("alphabet_size").get<int>();
    spec.boundaries = j.at("boundaries").get<std::vector<double>>();
    spec.centroids = j.at("centroids").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("partition JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

void save_partition(const std::filesystem::path& path, const PartitionSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << spec.to_json();
  if (!out) throw IoError("write failed: " + path.string());
}

PartitionSpec load_partition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return PartitionSpec::from_json(ss.str());
}

}  // namespace stsa
