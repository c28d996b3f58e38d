#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stsa/partition.hpp"

// D-Markov models: probabilistic finite-state automata whose states are the
// |A|^D words of length D, ordered lexicographically and indexed by their
// base-|A| packed value. Reading symbol a in state q shifts the window:
// next = (q mod |A|^(D-1)) * |A| + a. Emission probabilities are smoothed
// posterior means, (1 + N(a|q)) / (|A| + sum_b N(b|q)), so unvisited states
// fall back to the uniform row and every probability is strictly positive.
namespace stsa {

inline constexpr std::size_t kMaxStates = std::size_t{1} << 20;

struct BuildOptions {
  int depth = 1;  // context window D >= 1
  double stationary_tol = 1e-12;        // L1 change between sweeps
  std::int64_t max_iterations = 1000000;
  std::size_t dense_transition_cap = 4096;  // keep |Q| x |Q| matrix if |Q| <= cap
};

struct DMarkovModel {
  int depth = 1;
  int alphabet_size = 2;
  std::size_t num_states = 0;
  std::vector<std::int64_t> counts;    // num_states x |A|, row-major
  std::vector<double> emission;        // num_states x |A|, rows sum to 1
  std::vector<double> stationary;      // num_states, sums to 1
  // Dense state-to-state matrix, kept only for small state spaces; rebuild
  // rows on demand otherwise.
  std::optional<std::vector<double>> transition;
  std::string source_file;  // optional origin metadata, empty = omit
  std::string label;        // optional, empty = omit

  std::size_t next_state(std::size_t q, std::uint8_t a) const;
  std::vector<std::uint8_t> state_word(std::size_t q) const;
  std::string state_name(std::size_t q) const;  // symbol characters
  std::vector<double> transition_row(std::size_t q) const;

  std::string to_json() const;
  static DMarkovModel from_json(const std::string& text);
};

// Transition counts N(a|q) over the sequence: every length-D window except
// the last contributes to its successor symbol's cell. Requires
// length >= depth + 1 and |A|^depth <= kMaxStates.
std::vector<std::int64_t> count_transitions(const SymbolSeq& seq, int depth);

// Smoothed emission rows from raw counts.
std::vector<double> map_emission(const std::vector<std::int64_t>& counts,
                                 std::size_t num_states, int alphabet_size);

// Stationary distribution of the state chain by repeated application of the
// averaged transition operator (I + Pi)/2, which shares Pi's fixed points
// but stays stable on strongly alternating chains; each row has only |A|
// nonzeros. Throws NoConvergence if the L1 change between sweeps does not
// reach tol within max_iterations.
std::vector<double> stationary_dist(std::size_t num_states, int alphabet_size,
                                    const std::vector<double>& emission,
                                    double tol, std::int64_t max_iterations);

// Counts, emission, stationary distribution, and (when small) the dense
// transition matrix, in one pass.
DMarkovModel build_model(const SymbolSeq& seq, const BuildOptions& options);

// Model as a flat vector: the emission matrix row by row. Models are
// comparable this way when depth and alphabet agree.
std::vector<double> feature_vector(const DMarkovModel& model);

}  // namespace stsa
