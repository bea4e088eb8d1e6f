#pragma once

#include "lapf/quantization.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lapf {

enum class Split { train, val, test };
enum class DomainTag { in_domain, ood };

std::string_view to_string(Split s);
std::string_view to_string(DomainTag d);

struct ObservationRecord {
  double level_ratio = 0.0;  // water level as a fraction of the maximum, in [0, 1]
  std::string text;
  Split split = Split::train;
  DomainTag domain = DomainTag::in_domain;

  friend bool operator==(const ObservationRecord&, const ObservationRecord&) = default;
};

struct Corpus {
  std::vector<ObservationRecord> records;
  std::vector<double> level_grid;  // ascending distinct level ratios

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Evenly spaced level ratios lo, lo + (hi-lo)/steps, ..., hi.
struct LevelGrid {
  double lo = 0.0;
  double hi = 1.0;
  int steps = 50;

  std::vector<double> keys() const;
};

struct SplitFractions {
  // Proportions of the 1882 / 205 / 289 train / validation / test pairs.
  double train = 1882.0 / 2376.0;
  double val = 205.0 / 2376.0;
  double test = 289.0 / 2376.0;
};

/// Template-based synthetic observation texts, `texts_per_level` per grid
/// key. Texts come from one of five band banks (20% bands, blurred near band
/// edges) or, 15% of the time, from a bank of remarks that carry no level
/// information. All records come back in the train split; call split_corpus
/// next.
/// Pure function of its arguments.
Corpus generate_corpus(std::uint64_t seed, const LevelGrid& grid, int texts_per_level);

/// Stratified by level key with largest-remainder rounding, so every key's
/// split sizes are within one record of the exact proportions.
Corpus split_corpus(Corpus corpus, const SplitFractions& fractions, std::uint64_t seed);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in);

/// Training label of a record: the level ratio mapped linearly onto the
/// scheme's range, then quantized.
int label_of(const ObservationRecord& record, const QuantizationScheme& scheme);

/// Throws CorpusError unless every grid key has a train and a test record.
void check_split_coverage(const Corpus& corpus);

std::vector<const ObservationRecord*> select(const Corpus& corpus, Split split,
                                             DomainTag domain = DomainTag::in_domain);

/// One phrase per nonempty line, UTF-8.
std::vector<std::string> load_text_lines(const std::filesystem::path& path);

/// Dialect-flavored low-water phrases absent from the generated corpus.
std::vector<std::string> builtin_ood_bank();

}  // namespace lapf
