#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <doctest.h>

#include "stsa/errors.hpp"
#include "stsa/order.hpp"
#include "stsa/synth.hpp"

using stsa::ChainSpec;
using stsa::Signal;
using stsa::SymbolSeq;

namespace {

ChainSpec spec_of(int alphabet, int order, std::vector<double> flat,
                  std::uint64_t seed) {
  ChainSpec s;
  s.alphabet_size = alphabet;
  s.order = order;
  s.conditionals = std::move(flat);
  s.seed = seed;
  return s;
}

double rms(const Signal& s) {
  double acc = 0;
  for (double x : s.samples) acc += x * x;
  return std::sqrt(acc / static_cast<double>(s.samples.size()));
}

}  // namespace

TEST_SUITE("unit_synth") {

TEST_CASE("generator produces documented uniform and gaussian variates") {
  stsa::Rng rng(123);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));

  stsa::Rng g(77);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.gaussian();
    m1 += x;
    m2 += x * x;
  }
  CHECK(std::abs(m1 / n) < 0.02);
  CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("bounded draws stay in range and cover it") {
  stsa::Rng rng(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t v = rng.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(static_cast<void>(rng.uniform_below(0)), stsa::InvalidParams);
}

TEST_CASE("stream mixing separates seeds deterministically") {
  CHECK(stsa::mix_seed(42, 0) == stsa::mix_seed(42, 0));
  std::set<std::uint64_t> streams;
  for (std::uint64_t i = 0; i < 100; ++i) streams.insert(stsa::mix_seed(42, i));
  CHECK(streams.size() == 100);
  CHECK(stsa::mix_seed(42, 1) != stsa::mix_seed(43, 1));
}

TEST_CASE("chain simulation is reproducible and seed-sensitive") {
  const ChainSpec spec = spec_of(2, 1, {0.2, 0.8, 0.7, 0.3}, 5);
  const SymbolSeq a = stsa::simulate_chain(spec, 5000);
  const SymbolSeq b = stsa::simulate_chain(spec, 5000);
  CHECK(a.symbols == b.symbols);
  CHECK(a.alphabet_size == 2);
  CHECK(a.symbols.size() == 5000);

  ChainSpec other = spec;
  other.seed = 6;
  CHECK(stsa::simulate_chain(other, 5000).symbols != a.symbols);
}

TEST_CASE("degenerate rows force strict alternation") {
  const ChainSpec spec = spec_of(2, 1, {0.0, 1.0, 1.0, 0.0}, 11);
  const SymbolSeq s = stsa::simulate_chain(spec, 1000);
  for (std::size_t i = 1; i < s.symbols.size(); ++i)
    CHECK(s.symbols[i] == 1 - s.symbols[i - 1]);
}

TEST_CASE("order-zero chains match their marginal law") {
  const ChainSpec spec = spec_of(3, 0, {0.2, 0.5, 0.3}, 17);
  const SymbolSeq s = stsa::simulate_chain(spec, 200000);
  double freq[3] = {0, 0, 0};
  for (auto x : s.symbols) freq[x] += 1.0;
  for (int a = 0; a < 3; ++a)
    CHECK(freq[a] / 200000.0 ==
          doctest::Approx(spec.conditionals[a]).epsilon(0.05));
}

TEST_CASE("simulated conditionals track the generating chain at large n") {
  const ChainSpec spec = spec_of(2, 1, {0.2, 0.8, 0.7, 0.3}, 29);
  const SymbolSeq s = stsa::simulate_chain(spec, 100000);
  const std::size_t n = s.symbols.size() - 1;
  for (std::uint8_t b = 0; b < 2; ++b) {
    const std::uint8_t ctx[] = {b};
    for (std::uint8_t a = 0; a < 2; ++a) {
      const double est = stsa::empirical_conditional(s, ctx, a, 0, n);
      CHECK(std::abs(est - spec.conditionals[b * 2 + a]) < 0.02);
    }
  }
}

TEST_CASE("rows that ignore the older context symbol drop the order") {
  // Order-2 spec whose row for context (x, y) depends only on y: the chain
  // is really first order, and the estimator should say so.
  std::vector<double> flat;
  const double by_recent[2][2] = {{0.25, 0.75}, {0.65, 0.35}};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      flat.push_back(by_recent[y][0]);
      flat.push_back(by_recent[y][1]);
    }
  const ChainSpec spec = spec_of(2, 2, std::move(flat), 31);
  const SymbolSeq s = stsa::simulate_chain(spec, 100000);
  const auto est = stsa::estimate_order(s, stsa::OrderParams{});
  REQUIRE(est.order.has_value());
  CHECK(*est.order == 1);
}

TEST_CASE("chain spec json round trips and validates") {
  const ChainSpec spec = spec_of(2, 1, {0.25, 0.75, 0.5, 0.5}, 101);
  const std::string text = spec.to_json();
  const ChainSpec back = ChainSpec::from_json(text);
  CHECK(back.alphabet_size == spec.alphabet_size);
  CHECK(back.order == spec.order);
  CHECK(back.conditionals == spec.conditionals);
  CHECK(back.seed == spec.seed);

  ChainSpec bad = spec;
  bad.conditionals = {0.25, 0.70, 0.5, 0.5};  // first row sums to 0.95
  CHECK_THROWS_AS(bad.validate(), stsa::InvalidSpec);
  bad.conditionals = {0.25, 0.75};  // wrong row count for order 1
  CHECK_THROWS_AS(bad.validate(), stsa::InvalidSpec);
  CHECK_THROWS_AS(static_cast<void>(ChainSpec::from_json("{]")),
                  stsa::InvalidSpec);
}

TEST_CASE("surrogates are deterministic per seed") {
  const Signal a = stsa::surrogate_stable(2000, 7);
  const Signal b = stsa::surrogate_stable(2000, 7);
  CHECK(a.samples == b.samples);
  CHECK(stsa::surrogate_stable(2000, 8).samples != a.samples);

  const Signal u = stsa::surrogate_unstable(2000, 7);
  CHECK(u.samples == stsa::surrogate_unstable(2000, 7).samples);
  CHECK_THROWS_AS(static_cast<void>(stsa::surrogate_stable(10, 1)),
                  stsa::InvalidParams);
  CHECK_THROWS_AS(static_cast<void>(stsa::surrogate_unstable(999, 1)),
                  stsa::InvalidParams);
}

TEST_CASE("the oscillatory surrogate carries far more energy") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const double stable_rms = rms(stsa::surrogate_stable(20000, seed));
    const double unstable_rms = rms(stsa::surrogate_unstable(20000, seed));
    CHECK(unstable_rms / stable_rms >= 3.0);
  }
}

TEST_CASE("noise is unimodal, oscillation is bimodal") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Signal s = stsa::surrogate_stable(20000, seed);
    const auto sm = stsa::histogram_modes(s.samples);
    CHECK_FALSE(sm.bimodal);
    CHECK(sm.peak_bins.size() == 1);

    const Signal u = stsa::surrogate_unstable(20000, seed);
    const auto um = stsa::histogram_modes(u.samples);
    CHECK(um.bimodal);
    CHECK(um.peak_bins.size() >= 2);
  }
}

TEST_CASE("histogram peaks sit where the mass is") {
  // Two tight clusters near -1 and +1 with nothing between.
  std::vector<double> v;
  stsa::Rng rng(55);
  for (int i = 0; i < 4000; ++i) {
    const double c = (i % 2 == 0) ? -1.0 : 1.0;
    v.push_back(c + 0.05 * rng.gaussian());
  }
  const auto m = stsa::histogram_modes(v);
  CHECK(m.bimodal);
  REQUIRE(m.peak_bins.size() >= 2);
  CHECK(m.peak_bins.front() < 8);
  CHECK(m.peak_bins.back() >= 24);

  std::vector<double> mono;
  for (int i = 0; i < 4000; ++i) mono.push_back(rng.gaussian());
  CHECK_FALSE(stsa::histogram_modes(mono).bimodal);
}

TEST_CASE("short chain guards") {
  const ChainSpec spec = spec_of(2, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
                                 1);
  CHECK_THROWS_AS(static_cast<void>(stsa::simulate_chain(spec, 2)),
                  stsa::InvalidParams);
}

}  // TEST_SUITE
