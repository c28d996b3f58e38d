#include "stsa/metrics.hpp"

#include <cmath>
#include <vector>

#include "stsa/errors.hpp"
#include "stsa/kernels.hpp"

namespace stsa {

void check_prob_vector(std::span<const double> p) {
  if (p.empty()) throw DimensionMismatch("probability vector is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0) || v > 1.0)
      throw NonPositiveEntry("probability entries must lie in (0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw NonPositiveEntry("probability entries must sum to 1");
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw DimensionMismatch("vectors must have equal dimension");
  check_prob_vector(p);
  check_prob_vector(q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    d += p[i] * std::log(p[i] / q[i]);
  return d < 0.0 ? 0.0 : d;  // clip FP noise on p ~ q
}

double symmetric_kl(std::span<const double> p, std::span<const double> q) {
  return kl_divergence(p, q) + kl_divergence(q, p);
}

double model_complexity(const DMarkovModel& model) {
  const std::size_t a = static_cast<std::size_t>(model.alphabet_size);
  const std::size_t q = model.num_states;
  std::vector<double> logs(model.emission.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    logs[i] = std::log(model.emission[i]);
  // Symmetric KL in gap form: sum (p_i - q_i) * (ln p_i - ln q_i), each
  // term non-negative, so the running max needs no clipping.
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < a; ++k)
        d += (model.emission[i * a + k] - model.emission[j * a + k]) *
             (logs[i * a + k] - logs[j * a + k]);
      if (d > best) best = d;
    }
  }
  return best;
}

double info_gain_discrepancy(const DMarkovModel& model) {
  const std::size_t a = static_cast<std::size_t>(model.alphabet_size);
  const std::size_t q = model.num_states;
  std::vector<double> marginal(a, 0.0);
  for (std::size_t s = 0; s < q; ++s)
    for (std::size_t k = 0; k < a; ++k)
      marginal[k] += model.stationary[s] * model.emission[s * a + k];
  std::vector<double> log_marginal(a);
  for (std::size_t k = 0; k < a; ++k) log_marginal[k] = std::log(marginal[k]);
  double total = 0.0;
  for (std::size_t s = 0; s < q; ++s) {
    const double w = model.stationary[s];
    if (w == 0.0) continue;
    double d = 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      const double p = model.emission[s * a + k];
      d += p * (std::log(p) - log_marginal[k]);
    }
    total += w * d;
  }
  return total < 0.0 ? 0.0 : total;
}

double pairwise_model_distance(const DMarkovModel& m1,
                               const DMarkovModel& m2) {
  if (m1.depth != m2.depth || m1.alphabet_size != m2.alphabet_size)
    throw ShapeMismatch("models must share depth and alphabet");
  const std::vector<double> f1 = feature_vector(m1);
  const std::vector<double> f2 = feature_vector(m2);
  return std::sqrt(kernels::sq_diff_sum(f1, f2));
}

}  // namespace stsa
