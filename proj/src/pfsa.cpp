#include "stsa/pfsa.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include <nlohmann/json.hpp>

#include "stsa/errors.hpp"

namespace stsa {
namespace {

void check_alphabet(int alphabet_size) {
  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet)
    throw InvalidParams("alphabet size must be in [2, 36]");
}

// |A|^depth, guarded against exceeding the state cap.
std::size_t state_count(int alphabet_size, int depth) {
  if (depth < 1) throw InvalidParams("depth must be at least 1");
  std::size_t q = 1;
  for (int i = 0; i < depth; ++i) {
    if (q > kMaxStates / static_cast<std::size_t>(alphabet_size))
      throw DepthTooLarge("state space exceeds " + std::to_string(kMaxStates) +
                          " states");
    q *= static_cast<std::size_t>(alphabet_size);
  }
  return q;
}

}  // namespace

std::size_t DMarkovModel::next_state(std::size_t q, std::uint8_t a) const {
  std::size_t keep = 1;  // |A|^(depth-1)
  for (int i = 0; i < depth - 1; ++i)
    keep *= static_cast<std::size_t>(alphabet_size);
  return (q % keep) * static_cast<std::size_t>(alphabet_size) + a;
}

std::vector<std::uint8_t> DMarkovModel::state_word(std::size_t q) const {
  std::vector<std::uint8_t> word(static_cast<std::size_t>(depth));
  std::size_t v = q;
  for (int j = depth - 1; j >= 0; --j) {
    word[static_cast<std::size_t>(j)] =
        static_cast<std::uint8_t>(v % static_cast<std::size_t>(alphabet_size));
    v /= static_cast<std::size_t>(alphabet_size);
  }
  return word;
}

std::string DMarkovModel::state_name(std::size_t q) const {
  std::string name;
  for (std::uint8_t s : state_word(q)) name.push_back(symbol_char(s));
  return name;
}

std::vector<double> DMarkovModel::transition_row(std::size_t q) const {
  std::vector<double> row(num_states, 0.0);
  for (int a = 0; a < alphabet_size; ++a)
    row[next_state(q, static_cast<std::uint8_t>(a))] +=
        emission[q * static_cast<std::size_t>(alphabet_size) +
                 static_cast<std::size_t>(a)];
  return row;
}

std::vector<std::int64_t> count_transitions(const SymbolSeq& seq, int depth) {
  check_alphabet(seq.alphabet_size);
  const std::size_t q = state_count(seq.alphabet_size, depth);
  const std::size_t len = seq.symbols.size();
  if (len < static_cast<std::size_t>(depth) + 1)
    throw SequenceTooShort("need at least depth + 1 symbols");
  for (std::uint8_t s : seq.symbols)
    if (s >= seq.alphabet_size)
      throw InvalidParams("symbol value exceeds alphabet size");

  const std::size_t a64 = static_cast<std::size_t>(seq.alphabet_size);
  std::size_t keep = q / a64;  // |A|^(depth-1)
  std::vector<std::int64_t> counts(q * a64, 0);
  std::size_t state = 0;
  for (std::size_t t = 0; t < static_cast<std::size_t>(depth); ++t)
    state = state * a64 + seq.symbols[t];
  for (std::size_t t = static_cast<std::size_t>(depth); t < len; ++t) {
    const std::uint8_t a = seq.symbols[t];
    ++counts[state * a64 + a];
    state = (state % keep) * a64 + a;
  }
  return counts;
}

std::vector<double> map_emission(const std::vector<std::int64_t>& counts,
                                 std::size_t num_states, int alphabet_size) {
  check_alphabet(alphabet_size);
  const std::size_t a64 = static_cast<std::size_t>(alphabet_size);
  if (counts.size() != num_states * a64)
    throw ShapeMismatch("count matrix must be num_states x alphabet_size");
  std::vector<double> emission(counts.size());
  for (std::size_t q = 0; q < num_states; ++q) {
    std::int64_t total = 0;
    for (std::size_t a = 0; a < a64; ++a) {
      const std::int64_t c = counts[q * a64 + a];
      if (c < 0) throw InvalidParams("negative transition count");
      total += c;
    }
    const double denom = static_cast<double>(alphabet_size) +
                         static_cast<double>(total);
    for (std::size_t a = 0; a < a64; ++a)
      emission[q * a64 + a] =
          (1.0 + static_cast<double>(counts[q * a64 + a])) / denom;
  }
  return emission;
}

std::vector<double> stationary_dist(std::size_t num_states, int alphabet_size,
                                    const std::vector<double>& emission,
                                    double tol, std::int64_t max_iterations) {
  check_alphabet(alphabet_size);
  const std::size_t a64 = static_cast<std::size_t>(alphabet_size);
  if (emission.size() != num_states * a64)
    throw ShapeMismatch("emission matrix must be num_states x alphabet_size");
  if (!(tol > 0.0)) throw InvalidParams("tolerance must be positive");
  if (max_iterations < 1) throw InvalidParams("max_iterations must be >= 1");
  if (num_states == 1) return {1.0};

  // Shift structure: next = (q mod keep) * |A| + a, so successors only
  // depend on q mod keep. One sweep costs num_states * |A| operations.
  std::size_t keep = 1;
  while (keep * a64 < num_states) keep *= a64;

  std::vector<double> curr(num_states, 1.0 / static_cast<double>(num_states));
  std::vector<double> next(num_states);
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t q = 0; q < num_states; ++q) {
      const double p = curr[q];
      if (p == 0.0) continue;
      const std::size_t base = (q % keep) * a64;
      for (std::size_t a = 0; a < a64; ++a)
        next[base + a] += p * emission[q * a64 + a];
    }
    double sum = 0.0;
    for (double v : next) sum += v;
    for (double& v : next) v /= sum;
    // Average with the current iterate (the lazy chain (I + Pi)/2). The
    // fixed points are unchanged, but eigenvalues near -1, as in strongly
    // alternating chains, stop sustaining a period-two limit cycle.
    double diff = 0.0;
    for (std::size_t q = 0; q < num_states; ++q) {
      next[q] = 0.5 * (next[q] + curr[q]);
      diff += std::abs(next[q] - curr[q]);
    }
    curr.swap(next);
    if (diff <= tol) return curr;
  }
  throw NoConvergence("stationary distribution did not converge within " +
                      std::to_string(max_iterations) + " iterations");
}

DMarkovModel build_model(const SymbolSeq& seq, const BuildOptions& options) {
  DMarkovModel m;
  m.depth = options.depth;
  m.alphabet_size = seq.alphabet_size;
  m.counts = count_transitions(seq, options.depth);
  m.num_states = state_count(seq.alphabet_size, options.depth);
  m.emission = map_emission(m.counts, m.num_states, seq.alphabet_size);
  m.stationary = stationary_dist(m.num_states, seq.alphabet_size, m.emission,
                                 options.stationary_tol,
                                 options.max_iterations);
  if (m.num_states <= options.dense_transition_cap) {
    std::vector<double> t(m.num_states * m.num_states, 0.0);
    for (std::size_t q = 0; q < m.num_states; ++q) {
      for (int a = 0; a < seq.alphabet_size; ++a)
        t[q * m.num_states + m.next_state(q, static_cast<std::uint8_t>(a))] +=
            m.emission[q * static_cast<std::size_t>(seq.alphabet_size) +
                       static_cast<std::size_t>(a)];
    }
    m.transition = std::move(t);
  }
  return m;
}

std::vector<double> feature_vector(const DMarkovModel& model) {
  return model.emission;
}

std::string DMarkovModel::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["depth"] = depth;
  j["alphabet_size"] = alphabet_size;
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < num_states; ++q) states.push_back(state_name(q));
  j["states"] = std::move(states);
  const std::size_t a64 = static_cast<std::size_t>(alphabet_size);
  nlohmann::ordered_json jcounts = nlohmann::ordered_json::array();
  nlohmann::ordered_json jemission = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < num_states; ++q) {
    nlohmann::ordered_json crow = nlohmann::ordered_json::array();
    nlohmann::ordered_json erow = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < a64; ++a) {
      crow.push_back(counts[q * a64 + a]);
      erow.push_back(emission[q * a64 + a]);
    }
    jcounts.push_back(std::move(crow));
    jemission.push_back(std::move(erow));
  }
  j["counts"] = std::move(jcounts);
  j["emission"] = std::move(jemission);
  if (transition.has_value()) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t q = 0; q < num_states; ++q) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < num_states; ++k)
        row.push_back((*transition)[q * num_states + k]);
      rows.push_back(std::move(row));
    }
    j["transition"] = std::move(rows);
  } else {
    j["transition"] = nullptr;
  }
  j["stationary"] = stationary;
  if (!source_file.empty()) j["source_file"] = source_file;
  if (!label.empty()) j["label"] = label;
  return j.dump(2) + "\n";
}

DMarkovModel from_json_impl(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw InvalidSpec("unsupported model format_version");
    DMarkovModel m;
    m.depth = j.at("depth").get<int>();
    m.alphabet_size = j.at("alphabet_size").get<int>();
    check_alphabet(m.alphabet_size);
    m.num_states = state_count(m.alphabet_size, m.depth);
    const std::size_t a64 = static_cast<std::size_t>(m.alphabet_size);

    const auto& states = j.at("states");
    if (!states.is_array() || states.size() != m.num_states)
      throw InvalidSpec("states list does not match depth and alphabet");

    const auto& jc = j.at("counts");
    const auto& je = j.at("emission");
    if (jc.size() != m.num_states || je.size() != m.num_states)
      throw InvalidSpec("counts and emission must have one row per state");
    m.counts.reserve(m.num_states * a64);
    m.emission.reserve(m.num_states * a64);
    for (std::size_t q = 0; q < m.num_states; ++q) {
      const auto& crow = jc.at(q);
      const auto& erow = je.at(q);
      if (crow.size() != a64 || erow.size() != a64)
        throw InvalidSpec("matrix row width does not match alphabet");
      double rowsum = 0.0;
      for (std::size_t a = 0; a < a64; ++a) {
        const std::int64_t c = crow.at(a).get<std::int64_t>();
        if (c < 0) throw InvalidSpec("negative transition count");
        m.counts.push_back(c);
        const double p = erow.at(a).get<double>();
        if (!(p >= 0.0 && p <= 1.0))
          throw InvalidSpec("emission entry outside [0, 1]");
        m.emission.push_back(p);
        rowsum += p;
      }
      if (std::abs(rowsum - 1.0) > 1e-9)
        throw InvalidSpec("emission row does not sum to 1");
    }

    const auto& jt = j.at("transition");
    if (!jt.is_null()) {
      if (jt.size() != m.num_states)
        throw InvalidSpec("transition must be num_states x num_states");
      std::vector<double> t;
      t.reserve(m.num_states * m.num_states);
      for (std::size_t q = 0; q < m.num_states; ++q) {
        const auto& row = jt.at(q);
        if (row.size() != m.num_states)
          throw InvalidSpec("transition must be num_states x num_states");
        for (std::size_t k = 0; k < m.num_states; ++k)
          t.push_back(row.at(k).get<double>());
      }
      m.transition = std::move(t);
    }

    const auto& js = j.at("stationary");
    if (js.size() != m.num_states)
      throw InvalidSpec("stationary must have one entry per state");
    double psum = 0.0;
    m.stationary.reserve(m.num_states);
    for (std::size_t q = 0; q < m.num_states; ++q) {
      const double p = js.at(q).get<double>();
      if (!(p >= 0.0)) throw InvalidSpec("negative stationary probability");
      m.stationary.push_back(p);
      psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9)
      throw InvalidSpec("stationary distribution does not sum to 1");

    if (j.contains("source_file"))
      m.source_file = j.at("source_file").get<std::string>();
    if (j.contains("label")) m.label = j.at("label").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("malformed model file: ") + e.what());
  }
}

DMarkovModel DMarkovModel::from_json(const std::string& text) {
  return from_json_impl(text);
}

}  // namespace stsa
