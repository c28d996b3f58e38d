#include <cmath>
#include <filesystem>
#include <vector>

#include <doctest.h>

#include "stsa/errors.hpp"
#include "stsa/partition.hpp"
#include "stsa/synth.hpp"

using stsa::PartitionSpec;
using stsa::Signal;
using stsa::SymbolSeq;

namespace {

Signal make(std::vector<double> v) {
  Signal s;
  s.samples = std::move(v);
  return s;
}

std::vector<int> counts_of(const SymbolSeq& seq) {
  std::vector<int> c(static_cast<std::size_t>(seq.alphabet_size), 0);
  for (auto s : seq.symbols) ++c[s];
  return c;
}

}  // namespace

TEST_SUITE("unit_partition") {

TEST_CASE("quantile fit splits 1..6 at the median") {
  const PartitionSpec spec = stsa::fit_max_entropy(make({1, 2, 3, 4, 5, 6}), 2);
  REQUIRE(spec.boundaries.size() == 1);
  CHECK(spec.boundaries[0] == doctest::Approx(3.5));
  REQUIRE(spec.centroids.size() == 2);
  CHECK(spec.centroids[0] == doctest::Approx(2.0));
  CHECK(spec.centroids[1] == doctest::Approx(5.0));
  const auto c = counts_of(stsa::symbolize(spec, make({1, 2, 3, 4, 5, 6})));
  CHECK(c == std::vector<int>{3, 3});
}

TEST_CASE("quantile fit splits 1..6 into tertiles") {
  const PartitionSpec spec = stsa::fit_max_entropy(make({1, 2, 3, 4, 5, 6}), 3);
  REQUIRE(spec.boundaries.size() == 2);
  CHECK(spec.boundaries[0] == doctest::Approx(2.5));
  CHECK(spec.boundaries[1] == doctest::Approx(4.5));
  const auto c = counts_of(stsa::symbolize(spec, make({1, 2, 3, 4, 5, 6})));
  CHECK(c == std::vector<int>{2, 2, 2});
}

TEST_CASE("quantile fit is order-independent") {
  const PartitionSpec a = stsa::fit_max_entropy(make({6, 1, 4, 3, 5, 2}), 3);
  const PartitionSpec b = stsa::fit_max_entropy(make({1, 2, 3, 4, 5, 6}), 3);
  CHECK(a.boundaries == b.boundaries);
  CHECK(a.centroids == b.centroids);
}

TEST_CASE("ties that collapse a cell are rejected") {
  CHECK_THROWS_AS(stsa::fit_max_entropy(make({1, 1, 1, 2}), 3),
                  stsa::TooFewDistinctValues);
  CHECK_THROWS_AS(stsa::fit_max_entropy(make({7, 7, 7, 7, 7, 7}), 2),
                  stsa::TooFewDistinctValues);
}

TEST_CASE("equi-frequency on distinct data of length m*|A| is exact") {
  stsa::Rng rng(31);
  for (int alphabet : {2, 3, 5}) {
    std::vector<double> v(alphabet * 400);
    for (double& x : v) x = rng.gaussian();  // distinct w.p. 1
    const PartitionSpec spec = stsa::fit_max_entropy(make(v), alphabet);
    const auto c = counts_of(stsa::symbolize(spec, make(v)));
    for (int count : c) CHECK(count == 400);

    // Equal counts maximize symbol entropy at ln |A|.
    double h = 0;
    for (int count : c) {
      const double p = static_cast<double>(count) / static_cast<double>(v.size());
      h -= p * std::log(p);
    }
    CHECK(h == doctest::Approx(std::log(alphabet)).epsilon(1e-9));
  }
}

TEST_CASE("uniform fit slices the range evenly") {
  const PartitionSpec spec = stsa::fit_uniform(make({0.0, 3.0, 1.0, 2.0}), 3);
  REQUIRE(spec.boundaries.size() == 2);
  CHECK(spec.boundaries[0] == doctest::Approx(1.0));
  CHECK(spec.boundaries[1] == doctest::Approx(2.0));
  CHECK(spec.centroids[0] == doctest::Approx(0.5));
  CHECK(spec.centroids[1] == doctest::Approx(1.5));
  CHECK(spec.centroids[2] == doctest::Approx(2.5));

  const PartitionSpec two = stsa::fit_uniform(make({-1.0, 1.0}), 2);
  CHECK(two.boundaries[0] == doctest::Approx(0.0));

  CHECK_THROWS_AS(stsa::fit_uniform(make({4.0, 4.0, 4.0}), 2),
                  stsa::DegenerateSignal);
}

TEST_CASE("symbolize applies half-open cells with clamping") {
  PartitionSpec spec;
  spec.alphabet_size = 2;
  spec.boundaries = {3.5};
  spec.centroids = {2.0, 5.0};
  const SymbolSeq s = stsa::symbolize(spec, make({1, 2, 3, 4, 5, 6}));
  CHECK(s.symbols == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1});

  PartitionSpec three;
  three.alphabet_size = 3;
  three.boundaries = {2.5, 4.5};
  three.centroids = {1.0, 3.0, 5.0};
  const SymbolSeq t = stsa::symbolize(three, make({5, 1, 3}));
  CHECK(t.symbols == std::vector<std::uint8_t>{2, 0, 1});

  // Boundary value lands in the lower cell; out-of-range values clamp.
  const SymbolSeq u = stsa::symbolize(three, make({2.5, 4.5, -100, 100}));
  CHECK(u.symbols == std::vector<std::uint8_t>{0, 1, 0, 2});
}

TEST_CASE("symbolize commutes with a constant shift of data and boundaries") {
  stsa::Rng rng(5);
  std::vector<double> v(257);
  for (double& x : v) x = rng.gaussian();
  const PartitionSpec spec = stsa::fit_max_entropy(make(v), 4);
  PartitionSpec shifted = spec;
  for (double& b : shifted.boundaries) b += 10.0;
  for (double& c : shifted.centroids) c += 10.0;
  std::vector<double> w = v;
  for (double& x : w) x += 10.0;
  CHECK(stsa::symbolize(spec, make(v)).symbols ==
        stsa::symbolize(shifted, make(w)).symbols);
}

TEST_CASE("reconstruction error is the mean absolute centroid distance") {
  const PartitionSpec spec = stsa::fit_max_entropy(make({1, 2, 3, 4, 5, 6}), 2);
  CHECK(stsa::reconstruction_error(spec, make({1, 2, 3, 4, 5, 6})) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(stsa::reconstruction_error(spec, make({2.0, 5.0, 2.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("reconstruction error does not grow with a finer alphabet") {
  stsa::Rng rng(13);
  std::vector<double> v(4000);
  for (double& x : v) x = rng.gaussian();
  double prev = 1e300;
  for (int alphabet = 2; alphabet <= 8; ++alphabet) {
    const PartitionSpec spec = stsa::fit_max_entropy(make(v), alphabet);
    const double err = stsa::reconstruction_error(spec, make(v));
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("quantile partition beats uniform on heavy-tailed data") {
  stsa::Rng rng(17);
  std::vector<double> v(5000);
  for (double& x : v) {
    const double g = rng.gaussian();
    x = g * g * g;  // heavy tails
  }
  const double q_err =
      stsa::reconstruction_error(stsa::fit_max_entropy(make(v), 4), make(v));
  const double u_err =
      stsa::reconstruction_error(stsa::fit_uniform(make(v), 4), make(v));
  CHECK(q_err <= u_err);
}

TEST_CASE("partition json round trip") {
  const PartitionSpec spec =
      stsa::fit_max_entropy(make({0.1, 0.2, 0.30000000000000004, 0.7, 1.9}), 2);
  const std::string text = spec.to_json();
  const PartitionSpec back = PartitionSpec::from_json(text);
  CHECK(back.method == spec.method);
  CHECK(back.alphabet_size == spec.alphabet_size);
  CHECK(back.boundaries == spec.boundaries);  // bit-exact reload
  CHECK(back.centroids == spec.centroids);
  CHECK(back.to_json() == text);

  CHECK_THROWS_AS(PartitionSpec::from_json("{"), stsa::InvalidSpec);
  CHECK_THROWS_AS(PartitionSpec::from_json("{\"method\":\"max_entropy\"}"),
                  stsa::InvalidSpec);
}

TEST_CASE("spec validation rejects malformed partitions") {
  PartitionSpec bad;
  bad.alphabet_size = 3;
  bad.boundaries = {2.0, 1.0};  // not increasing
  bad.centroids = {0.0, 1.5, 3.0};
  CHECK_THROWS_AS(bad.validate(), stsa::InvalidSpec);
  bad.boundaries = {1.0, 2.0};
  bad.centroids = {0.0, 5.0, 3.0};  // centroid outside its cell
  CHECK_THROWS_AS(bad.validate(), stsa::InvalidSpec);
  bad.centroids = {0.0, 1.5};  // wrong arity
  CHECK_THROWS_AS(bad.validate(), stsa::InvalidSpec);
}

TEST_CASE("symbol file round trip and header validation") {
  SymbolSeq seq;
  seq.alphabet_size = 12;
  seq.symbols = {0, 1, 9, 10, 11, 3};
  const auto path =
      std::filesystem::temp_directory_path() / "stsa_symbols_test.sym";
  stsa::write_symbols(path, seq);
  const SymbolSeq back = stsa::read_symbols(path);
  CHECK(back.alphabet_size == 12);
  CHECK(back.symbols == seq.symbols);
  CHECK(stsa::symbols_text(seq).substr(0, 13) == "#alphabet=12\n");
  std::filesystem::remove(path);
}

TEST_CASE("symbol characters cover digits and letters") {
  CHECK(stsa::symbol_char(0) == '0');
  CHECK(stsa::symbol_char(9) == '9');
  CHECK(stsa::symbol_char(10) == 'a');
  CHECK(stsa::symbol_char(35) == 'z');
  CHECK(stsa::symbol_value('7') == 7);
  CHECK(stsa::symbol_value('c') == 12);
  CHECK_THROWS_AS(stsa::symbol_value('!'), stsa::InvalidSpec);
}

TEST_CASE("alphabet bounds are enforced") {
  CHECK_THROWS_AS(stsa::fit_max_entropy(make({1, 2, 3}), 1),
                  stsa::InvalidParams);
  CHECK_THROWS_AS(stsa::fit_max_entropy(make({1, 2, 3}), 37),
                  stsa::InvalidParams);
}

}  // TEST_SUITE
