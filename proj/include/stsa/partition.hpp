#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stsa/signal.hpp"

// Alphabet partitioning of a continuous signal. The maximum-entropy fit
// places cell boundaries at empirical quantiles so each cell holds an
// (approximately) equal share of the fitting data; the uniform fit slices
// the observed range into equal-width cells. Cells are open on the left and
// closed on the right; values beyond the outer boundaries fall into the
// first or last cell.
namespace stsa {

enum class PartitionMethod { MaxEntropy, Uniform };

struct PartitionSpec {
  PartitionMethod method = PartitionMethod::MaxEntropy;
  int alphabet_size = 0;
  std::vector<double> boundaries;  // alphabet_size - 1, strictly increasing
  std::vector<double> centroids;   // alphabet_size, centroids[i] in cell i

  // Throws InvalidSpec when sizes, ordering, or centroid placement are off.
  void validate() const;

  std::string to_json() const;
  static PartitionSpec from_json(const std::string& text);
};

struct SymbolSeq {
  std::vector<std::uint8_t> symbols;
  int alphabet_size = 0;
};

// Alphabet sizes supported by the symbol-file format (digits then letters).
inline constexpr int kMaxAlphabet = 36;

// Quantile partition: boundary k sits at the midpoint of the two order
// statistics straddling level N*k/alphabet_size. Throws TooFewDistinctValues
// when ties collapse a cell. Centroids are per-cell means of the fit data.
PartitionSpec fit_max_entropy(const Signal& s, int alphabet_size);

// Equal-width partition over [min, max]; centroids are cell midpoints.
// Throws DegenerateSignal when max == min.
PartitionSpec fit_uniform(const Signal& s, int alphabet_size);

// Ties at a boundary go to the lower cell.
SymbolSeq symbolize(const PartitionSpec& spec, const Signal& s);

// Mean absolute deviation between samples and their cell centroids.
double reconstruction_error(const PartitionSpec& spec, const Signal& s);

char symbol_char(int value);
int symbol_value(char c);

// One symbol character per line after a "#alphabet=K" header.
void write_symbols(const std::filesystem::path& path, const SymbolSeq& seq);
SymbolSeq read_symbols(const std::filesystem::path& path);

// The exact bytes write_symbols emits.
std::string symbols_text(const SymbolSeq& seq);

void save_partition(const std::filesystem::path& path, const PartitionSpec& spec);
PartitionSpec load_partition(const std::filesystem::path& path);

}  // namespace stsa
