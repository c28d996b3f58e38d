#pragma once

#include <span>

#include "stsa/pfsa.hpp"

// Divergence-based metrics over probability vectors and fitted models.
// Natural logarithm throughout. Inputs are expected to be smoothed, i.e.
// strictly positive; the vector-level entry points reject zeros outright
// instead of adopting a silent 0*log(0) convention.
namespace stsa {

// Throws unless p has the given dimension, every entry lies in (0, 1], and
// the entries sum to 1 within 1e-12.
void check_prob_vector(std::span<const double> p);

// Sum of p_i * ln(p_i / q_i). Non-negative, zero iff p == q, asymmetric.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// kl_divergence(p, q) + kl_divergence(q, p); a symmetric dissimilarity.
double symmetric_kl(std::span<const double> p, std::span<const double> q);

// Largest symmetric KL distance between any two states' emission rows: how
// far apart the model's most dissimilar states are. 0 iff all rows agree.
// (An average over pairs would also make sense as a smoother variant; only
// the maximum is implemented.)
double model_complexity(const DMarkovModel& model);

// Stationary-weighted KL of each state's emission row from the marginal
// symbol distribution sum_q stationary[q] * emission[q][.]. Equals the
// mutual information between the current state and the next symbol.
double info_gain_discrepancy(const DMarkovModel& model);

// L2 distance between the models' feature vectors. Requires equal depth
// and alphabet.
double pairwise_model_distance(const DMarkovModel& m1, const DMarkovModel& m2);

}  // namespace stsa
