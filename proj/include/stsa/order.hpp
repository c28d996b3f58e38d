#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stsa/partition.hpp"

// Memory-order estimation for symbol sequences. The consistent estimator
// splits the sequence in half, restricts attention to words that occur in
// the first half and occur more than n^(1-gamma) times in the second half,
// and returns the smallest context length k whose conditional next-symbol
// statistics cannot be improved by any longer context: the largest gap
// between the k-context and extended-context conditionals must fall to
// n^(-beta). Here n is the largest sample index (length - 1), and the
// halves are [0, ceil(n/2)-1] and [ceil(n/2), n].
//
// The spectral rule instead looks at the one-step symbol transition matrix
// and asks how many steps D are needed for the memory of the initial state
// to decay: the smallest D >= 1 with |lambda_2|^D <= epsilon.
namespace stsa {

struct OrderParams {
  double gamma = 0.5;  // support threshold exponent, in (0, 1)
  double beta = 0.2;   // decision threshold exponent, in (0, (1-gamma)/2)
  int k_max = -1;      // -1: floor(log n / log |A|) - 1, clamped to >= 0
  int i_max = -1;      // extension scan depth; -1: k_max + 8
};

struct SupportSizes {
  std::int64_t first_half = 0;   // words of length k+1 seen in the first half
  std::int64_t second_half = 0;  // words frequent in the second half
  std::int64_t both = 0;         // intersection
};

struct OrderEstimate {
  // Smallest k with delta_curve[k] <= threshold; empty when no k up to
  // k_max_used qualifies (long or unbounded memory at this sample size).
  std::optional<int> order;
  std::vector<double> delta_curve;      // delta-hat for k = 0..k_max_used
  std::vector<int> argmax_i;            // extension depth attaining each max, 0 if none
  double threshold = 0.0;               // n^(-beta)
  std::vector<SupportSizes> support_sizes;  // per k, word length k+1
  double gamma = 0.0;
  double beta = 0.0;
  int k_max_used = 0;
  int i_max_used = 0;
  std::size_t n = 0;  // largest sample index (length - 1)

  std::string to_json() const;
};

// Empirical conditional probability of symbol a after the given context,
// computed over sample indices [n1, n2] (inclusive): occurrences of
// context+a ending in [n1+|ctx|, n2] divided by occurrences of the context
// that can still be extended within the range. 0/0 is defined as 0.
double empirical_conditional(const SymbolSeq& seq,
                             std::span<const std::uint8_t> context,
                             std::uint8_t a, std::size_t n1, std::size_t n2);

// Words of length k+1 that occur in the first half and occur more than
// n^(1-gamma) times entirely within the second half, in lexicographic order.
std::vector<std::vector<std::uint8_t>> support_sets(const SymbolSeq& seq,
                                                    int k, double gamma);

// Largest conditional gap at context length k: the max over extension
// depths i = 1..i_max and words b.a in the supported set of length k+i+1 of
// |C(a | last k of b) - C(a | b)|, both conditionals over the second half.
// 0 when every relevant support set is empty.
double delta_hat(const SymbolSeq& seq, int k, const OrderParams& params);

// Consistent order estimate with full diagnostics. Requires length >= 10.
OrderEstimate estimate_order(const SymbolSeq& seq, const OrderParams& params);

struct SpectralDepth {
  int depth = 1;
  double lambda2 = 0.0;   // second-largest eigenvalue modulus
  double epsilon = 0.0;
  int d_max = 0;
  bool non_mixing = false;  // |lambda2| within 1e-9 of 1; depth pinned to d_max
  bool capped = false;      // rule produced more than d_max
};

// Smallest D >= 1 with |lambda2(pi1)|^D <= epsilon, where pi1 is the
// row-stochastic one-step matrix (row-major, dim x dim). Throws
// NotStochastic for malformed rows.
SpectralDepth spectral_depth(std::span<const double> pi1, int dim,
                             double epsilon, int d_max = 5);

}  // namespace stsa
