#include "stsa/order.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "stsa/errors.hpp"

namespace stsa {
namespace {

void check_symbols(const SymbolSeq& seq) {
  if (seq.alphabet_size < 2 || seq.alphabet_size > kMaxAlphabet)
    throw InvalidParams("alphabet size must be in [2, 36]");
  for (std::uint8_t s : seq.symbols)
    if (s >= seq.alphabet_size)
      throw InvalidParams("symbol value exceeds alphabet size");
}

// Longest word length L with alphabet^L representable in a packed word.
int max_packed_length(int alphabet) {
  int len = 0;
  std::uint64_t cap = std::uint64_t{1} << 62;
  std::uint64_t acc = 1;
  while (acc <= cap / static_cast<std::uint64_t>(alphabet)) {
    acc *= static_cast<std::uint64_t>(alphabet);
    ++len;
  }
  return len;
}

struct Resolved {
  std::int64_t len = 0;
  std::int64_t n = 0;     // largest index
  std::int64_t half = 0;  // first second-half index, ceil(n/2)
  double gamma = 0.0;
  double beta = 0.0;
  int k_max = 0;
  int i_max = 0;
  double count_floor = 0.0;  // n^(1-gamma)
  double threshold = 0.0;    // n^(-beta)
};

Resolved resolve(const SymbolSeq& seq, const OrderParams& p) {
  check_symbols(seq);
  Resolved r;
  r.len = static_cast<std::int64_t>(seq.symbols.size());
  if (r.len < 10) throw SequenceTooShort("need at least 10 symbols");
  if (!(p.gamma > 0.0 && p.gamma < 1.0))
    throw InvalidParams("gamma must lie in (0, 1)");
  if (!(p.beta > 0.0 && 2.0 * p.beta + p.gamma < 1.0))
    throw InvalidParams("beta must lie in (0, (1 - gamma)/2)");
  r.gamma = p.gamma;
  r.beta = p.beta;
  r.n = r.len - 1;
  r.half = (r.n + 1) / 2;

  const int a = seq.alphabet_size;
  const int packable = max_packed_length(a);
  int k_max = p.k_max;
  if (k_max < 0) {
    k_max = static_cast<int>(std::log(static_cast<double>(r.n)) /
                             std::log(static_cast<double>(a))) -
            1;
    if (k_max < 0) k_max = 0;
  }
  // A word of length k+1 must fit in the first half and stay packable.
  k_max = std::min<std::int64_t>(k_max, r.half - 1);
  k_max = std::min(k_max, packable - 2);
  if (k_max < 0) k_max = 0;
  int i_max = p.i_max;
  if (i_max < 0) i_max = k_max + 8;
  if (i_max < 1) throw InvalidParams("i_max must be at least 1");
  i_max = std::min(i_max, packable - 1 - k_max);
  if (i_max < 1) i_max = 1;
  r.k_max = k_max;
  r.i_max = i_max;

  const double nd = static_cast<double>(r.n);
  r.count_floor = std::pow(nd, 1.0 - r.gamma);
  r.threshold = std::pow(nd, -r.beta);
  return r;
}

struct LevelStats {
  std::int64_t first_half = 0;
  std::int64_t second_half = 0;
  // Second-half counts of frequent words (count > n^(1-gamma)). Every word
  // the conditional scan queries is a subword of a supported word, so its
  // count dominates that word's and it is always retained here.
  std::unordered_map<std::uint64_t, std::int64_t> frequent;
  std::vector<std::uint64_t> support;  // frequent and seen in the first half
};

// Per-length word statistics over both halves, built lazily level by level.
// Supports are prefix-closed in length: if no word of length L is supported
// then no longer word is either, so construction stops at the first empty
// level past the diagnostic range.
class SupportIndex {
 public:
  SupportIndex(const SymbolSeq& seq, const Resolved& r, int diag_len,
               int need_len)
      : r_(r), alphabet_(seq.alphabet_size) {
    pow_.assign(static_cast<std::size_t>(need_len) + 2, 1);
    for (std::size_t i = 1; i < pow_.size(); ++i)
      pow_[i] = pow_[i - 1] * static_cast<std::uint64_t>(alphabet_);
    end_suffix_.assign(static_cast<std::size_t>(need_len) + 1, 0);
    for (int l = 1; l <= need_len; ++l) {
      const std::uint8_t s = seq.symbols[static_cast<std::size_t>(r_.len - l)];
      end_suffix_[static_cast<std::size_t>(l)] =
          static_cast<std::uint64_t>(s) * pow_[static_cast<std::size_t>(l - 1)] +
          end_suffix_[static_cast<std::size_t>(l - 1)];
    }

    levels_.resize(static_cast<std::size_t>(need_len) + 1);
    bool chain_alive = true;
    for (int len = 1; len <= need_len; ++len) {
      if (len > diag_len && !chain_alive) break;
      build_level(seq, len);
      chain_alive = !levels_[static_cast<std::size_t>(len)].support.empty();
      computed_ = len;
    }
  }

  const LevelStats* level(int len) const {
    if (len < 1 || len > computed_) return nullptr;
    return &levels_[static_cast<std::size_t>(len)];
  }

  // Second-half conditional C(a | ctx) with the usual 0/0 := 0 convention.
  // The denominator drops a context occurrence at the very last index,
  // which has no successor inside the range.
  double cond(std::uint64_t ctx, int ctx_len, std::uint8_t a) const {
    const std::int64_t num =
        count(ctx_len + 1, ctx * static_cast<std::uint64_t>(alphabet_) + a);
    std::int64_t den = 0;
    if (ctx_len == 0) {
      den = r_.n - r_.half + 1;
    } else {
      den = count(ctx_len, ctx);
      if (den > 0 && end_suffix_[static_cast<std::size_t>(ctx_len)] == ctx)
        den -= 1;
    }
    if (den <= 0) return 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  }

  std::uint64_t pow(int e) const { return pow_[static_cast<std::size_t>(e)]; }

 private:
  std::int64_t count(int len, std::uint64_t word) const {
    if (len < 1 || len > computed_) return 0;
    const auto& m = levels_[static_cast<std::size_t>(len)].frequent;
    auto it = m.find(word);
    return it == m.end() ? 0 : it->second;
  }

  void build_level(const SymbolSeq& seq, int len) {
    LevelStats& st = levels_[static_cast<std::size_t>(len)];
    const std::uint64_t keep = pow_[static_cast<std::size_t>(len - 1)];
    const std::uint64_t a64 = static_cast<std::uint64_t>(alphabet_);
    const auto& s = seq.symbols;

    // Distinct words ending in [len-1, half-1], i.e. fully in the first half.
    std::unordered_set<std::uint64_t> present;
    if (len <= r_.half) {
      present.reserve(static_cast<std::size_t>(r_.half - len + 1));
      std::uint64_t w = 0;
      for (std::int64_t t = 0; t < len; ++t)
        w = w * a64 + s[static_cast<std::size_t>(t)];
      for (std::int64_t t = len - 1;;) {
        present.insert(w);
        if (++t > r_.half - 1) break;
        w = (w % keep) * a64 + s[static_cast<std::size_t>(t)];
      }
    }
    st.first_half = static_cast<std::int64_t>(present.size());

    // Occurrence counts for words ending in [half+len-1, n].
    std::unordered_map<std::uint64_t, std::int64_t> counts;
    const std::int64_t t0 = r_.half + len - 1;
    if (t0 <= r_.n) {
      counts.reserve(static_cast<std::size_t>(r_.n - t0 + 1));
      std::uint64_t w = 0;
      for (std::int64_t t = r_.half; t <= t0; ++t)
        w = w * a64 + s[static_cast<std::size_t>(t)];
      for (std::int64_t t = t0;;) {
        ++counts[w];
        if (++t > r_.n) break;
        w = (w % keep) * a64 + s[static_cast<std::size_t>(t)];
      }
    }

    for (const auto& [word, c] : counts) {
      if (static_cast<double>(c) > r_.count_floor) {
        st.frequent.emplace(word, c);
        if (present.contains(word)) st.support.push_back(word);
      }
    }
    st.second_half = static_cast<std::int64_t>(st.frequent.size());
    std::sort(st.support.begin(), st.support.end());
  }

  Resolved r_;
  int alphabet_ = 0;
  int computed_ = 0;
  std::vector<LevelStats> levels_;
  std::vector<std::uint64_t> pow_;
  std::vector<std::uint64_t> end_suffix_;
};

// Max conditional gap at context length k; argmax_i reports the extension
// depth where it occurred (0 when every scanned support set was empty).
std::pair<double, int> delta_scan(const SupportIndex& idx, int k, int i_max,
                                  int alphabet) {
  double best = 0.0;
  int best_i = 0;
  bool any = false;
  const std::uint64_t a64 = static_cast<std::uint64_t>(alphabet);
  for (int i = 1; i <= i_max; ++i) {
    const LevelStats* lv = idx.level(k + i + 1);
    if (lv == nullptr || lv->support.empty()) break;
    for (std::uint64_t w : lv->support) {
      const std::uint64_t b = w / a64;
      const std::uint8_t a = static_cast<std::uint8_t>(w % a64);
      const std::uint64_t tail = b % idx.pow(k);
      const double gap = std::abs(idx.cond(tail, k, a) - idx.cond(b, k + i, a));
      if (!any || gap > best) {
        best = gap;
        best_i = i;
        any = true;
      }
    }
  }
  return {any ? best : 0.0, any ? best_i : 0};
}

}  // namespace

double empirical_conditional(const SymbolSeq& seq,
                             std::span<const std::uint8_t> context,
                             std::uint8_t a, std::size_t n1, std::size_t n2) {
  check_symbols(seq);
  if (a >= seq.alphabet_size) throw InvalidParams("symbol exceeds alphabet");
  for (std::uint8_t c : context)
    if (c >= seq.alphabet_size)
      throw InvalidParams("context symbol exceeds alphabet");
  if (n2 >= seq.symbols.size() || n1 > n2)
    throw InvalidParams("index range must satisfy n1 <= n2 < length");

  const std::size_t c = context.size();
  const auto& s = seq.symbols;
  std::int64_t num = 0;
  std::int64_t den = 0;
  if (c == 0) {
    den = static_cast<std::int64_t>(n2 - n1 + 1);
    for (std::size_t t = n1; t <= n2; ++t) num += (s[t] == a) ? 1 : 0;
  } else {
    auto match = [&](std::size_t end) {  // context occupies [end-c+1, end]
      for (std::size_t j = 0; j < c; ++j)
        if (s[end - c + 1 + j] != context[j]) return false;
      return true;
    };
    for (std::size_t t = n1 + c; t <= n2; ++t)
      num += (s[t] == a && match(t - 1)) ? 1 : 0;
    for (std::size_t t = n1 + c - 1; t + 1 <= n2; ++t)
      den += match(t) ? 1 : 0;
  }
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::vector<std::uint8_t>> support_sets(const SymbolSeq& seq,
                                                    int k, double gamma) {
  if (k < 0) throw InvalidParams("k must be non-negative");
  OrderParams p;
  p.gamma = gamma;
  p.beta = 0.49 * (1.0 - gamma);  // placeholder satisfying the constraint
  Resolved r = resolve(seq, p);
  const int len = k + 1;
  if (len > max_packed_length(seq.alphabet_size) || len > r.half)
    throw InvalidParams("k too large for this sequence");
  SupportIndex idx(seq, r, len, len);
  const LevelStats* lv = idx.level(len);
  std::vector<std::vector<std::uint8_t>> out;
  if (lv == nullptr) return out;
  out.reserve(lv->support.size());
  const std::uint64_t a64 = static_cast<std::uint64_t>(seq.alphabet_size);
  for (std::uint64_t w : lv->support) {
    std::vector<std::uint8_t> word(static_cast<std::size_t>(len));
    std::uint64_t v = w;
    for (int j = len - 1; j >= 0; --j) {
      word[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(v % a64);
      v /= a64;
    }
    out.push_back(std::move(word));
  }
  return out;
}

double delta_hat(const SymbolSeq& seq, int k, const OrderParams& params) {
  Resolved r = resolve(seq, params);
  if (k < 0 || k > r.k_max)
    throw InvalidParams("k must lie in [0, k_max]");
  SupportIndex idx(seq, r, k + 1, k + r.i_max + 1);
  return delta_scan(idx, k, r.i_max, seq.alphabet_size).first;
}

OrderEstimate estimate_order(const SymbolSeq& seq, const OrderParams& params) {
  Resolved r = resolve(seq, params);
  SupportIndex idx(seq, r, r.k_max + 1, r.k_max + r.i_max + 1);

  OrderEstimate est;
  est.gamma = r.gamma;
  est.beta = r.beta;
  est.k_max_used = r.k_max;
  est.i_max_used = r.i_max;
  est.n = static_cast<std::size_t>(r.n);
  est.threshold = r.threshold;
  est.delta_curve.reserve(static_cast<std::size_t>(r.k_max) + 1);
  est.argmax_i.reserve(static_cast<std::size_t>(r.k_max) + 1);
  est.support_sizes.reserve(static_cast<std::size_t>(r.k_max) + 1);

  for (int k = 0; k <= r.k_max; ++k) {
    const auto [delta, arg_i] = delta_scan(idx, k, r.i_max, seq.alphabet_size);
    est.delta_curve.push_back(delta);
    est.argmax_i.push_back(arg_i);
    SupportSizes sz;
    if (const LevelStats* lv = idx.level(k + 1); lv != nullptr) {
      sz.first_half = lv->first_half;
      sz.second_half = lv->second_half;
      sz.both = static_cast<std::int64_t>(lv->support.size());
    }
    est.support_sizes.push_back(sz);
    if (!est.order.has_value() && delta <= r.threshold) est.order = k;
  }
  return est;
}

std::string OrderEstimate::to_json() const {
  nlohmann::ordered_json j;
  if (order.has_value())
    j["order"] = *order;
  else
    j["order"] = nullptr;
  j["threshold"] = threshold;
  j["delta_curve"] = delta_curve;
  j["argmax_i"] = argmax_i;
  nlohmann::ordered_json sizes = nlohmann::ordered_json::array();
  for (const SupportSizes& s : support_sizes) {
    nlohmann::ordered_json row;
    row["first_half"] = s.first_half;
    row["second_half"] = s.second_half;
    row["both"] = s.both;
    sizes.push_back(std::move(row));
  }
  j["support_sizes"] = std::move(sizes);
  j["gamma"] = gamma;
  j["beta"] = beta;
  j["k_max"] = k_max_used;
  j["i_max"] = i_max_used;
  j["n"] = n;
  return j.dump(2) + "\n";
}

SpectralDepth spectral_depth(std::span<const double> pi1, int dim,
                             double epsilon, int d_max) {
  if (dim < 1 || pi1.size() != static_cast<std::size_t>(dim) *
                                   static_cast<std::size_t>(dim))
    throw ShapeMismatch("one-step matrix must be dim x dim");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidParams("epsilon must lie in (0, 1)");
  if (d_max < 1) throw InvalidParams("d_max must be at least 1");

  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    double row = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double v = pi1[static_cast<std::size_t>(i) *
                               static_cast<std::size_t>(dim) +
                           static_cast<std::size_t>(j)];
      if (!std::isfinite(v) || v < 0.0)
        throw NotStochastic("matrix entries must be finite and non-negative");
      m(i, j) = v;
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw NotStochastic("matrix rows must sum to 1");
  }

  SpectralDepth out;
  out.epsilon = epsilon;
  out.d_max = d_max;
  if (dim == 1) {
    out.lambda2 = 0.0;
    out.depth = 1;
    return out;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eigenvalue computation failed");
  std::vector<double> mods(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    mods[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()[i]);
  std::sort(mods.begin(), mods.end(), std::greater<>());
  out.lambda2 = mods[1];

  if (out.lambda2 > 1.0 - 1e-9) {
    // No spectral gap: powers of the matrix never forget the start state.
    out.non_mixing = true;
    out.depth = d_max;
    return out;
  }
  if (out.lambda2 <= epsilon) {
    out.depth = 1;
    return out;
  }
  // Smallest D with lambda2^D <= epsilon.
  const double d = std::log(epsilon) / std::log(out.lambda2);
  int depth = static_cast<int>(std::ceil(d - 1e-12));
  if (depth < 1) depth = 1;
  if (depth > d_max) {
    out.capped = true;
    depth = d_max;
  }
  out.depth = depth;
  return out;
}

}  // namespace stsa
