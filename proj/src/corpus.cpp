#include "lapf/corpus.hpp"

#include "lapf/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace lapf {

namespace {

// Band templates. {r} river word, {w} water word, {i} intensifier, {e} ending.
const std::array<std::vector<std::string_view>, 5> kBands = {{
    {
        "There's barely any {w} out here{e}",
        "The {r} is {i}dry{e}",
        "Hardly a trickle left in the {r}{e}",
        "You can see the bottom of the {r}{e}",
        "The {r} bed is {i}exposed{e}",
        "Almost no {w} in the {r}{e}",
        "Just a few puddles left in the {r}{e}",
        "The {r} has {i}dried up{e}",
        "Not much {w} at all out here{e}",
        "The {r} is {i}empty, the fields need rain{e}",
    },
    {
        "The {w} level is {i}low{e}",
        "The {r} is running shallow{e}",
        "Only a thin line of {w} in the {r}{e}",
        "The {r} looks {i}low, lots of bank showing{e}",
        "The {w} is below normal in the {r}{e}",
        "The {r} is a bit on the low side{e}",
        "Shallow {w}, you could wade across{e}",
        "Less {w} than usual in the {r}{e}",
        "The {r} is {i}low but still moving{e}",
    },
    {
        "The {r}'s flowing {i}gently{e}",
        "The {w} level looks normal{e}",
        "A calm, steady {w} in the {r}{e}",
        "The {r} is at its usual level{e}",
        "Nothing unusual, the {r} is flowing fine{e}",
        "Moderate {w} in the {r}{e}",
        "The {r} is about half full{e}",
        "Peaceful {r}, {i}normal flow{e}",
        "The {w} is neither high nor low{e}",
    },
    {
        "The {r} is running {i}high{e}",
        "The {w} has risen a lot{e}",
        "The {r} is fuller than usual{e}",
        "Fast {w}, the {r} is swollen{e}",
        "The {w} is up near the top of the banks{e}",
        "The {r} is high and moving {i}quickly{e}",
        "Lots of {w} in the {r} after the rain{e}",
        "The {r} looks {i}full{e}",
        "The {w} is climbing up the banks{e}",
    },
    {
        "Almost flooding, this is {i}scary{e}",
        "The {w}'s {i}high, hope it's okay{e}",
        "The {r} is about to overflow{e}",
        "The {w} is spilling over the banks{e}",
        "Dangerous level, stay away from the {r}{e}",
        "The {r} is flooding the fields{e}",
        "The {w} is right at the brim{e}",
        "The {r} is overflowing, {i}dangerous{e}",
        "Flood level, the {r} could burst{e}",
    },
}};

// Reports that say nothing about the level.
const std::vector<std::string_view> kChatter = {
    "Walked the dog along the {r} this morning{e}",
    "Saw some ducks by the {r}{e}",
    "Passing the {r} on my way to work{e}",
    "Nice weather by the {r}{e}",
    "Checked on the {r} again{e}",
    "Someone left a bike next to the {r}{e}",
    "Taking photos near the {r}{e}",
    "Met a neighbour at the {r}{e}",
};

const std::array<std::string_view, 5> kRiver = {"river", "canal", "channel", "stream", "waterway"};
const std::array<std::string_view, 3> kWater = {"water", "water", "flow"};
const std::array<std::string_view, 6> kIntensifier = {"", "really ", "pretty ", "quite ", "very ", "so "};
const std::array<std::string_view, 6> kEnding = {".", "!", "...", " today.", " right now.", ""};
const std::array<std::string_view, 5> kPrefix = {"Wow, ", "Hmm, ", "Just checked: ", "Heads up, ", "FYI "};

const std::vector<std::string> kOodBank = {
    "Thur's nae watter in yon burn the noo",
    "Burn's gey dry, ye could walk it in yer slippers",
    "Aye, the watter's awfy wee the day",
    "Ain't hardly a lick o' water down yonder",
    "Crick's plumb dried up, y'all",
    "Dern ditch ain't got nothin' in it no more",
    "Yon beck's nowt but stanes, nobbut a dribble",
    "Eee, t'beck's bone dry, nowt in it",
    "Th' cut's gone reet low, tha can see t'muck",
    "Reckon that crik's fixin' to go dry",
    "Ol' branch is puny as all get-out",
    "Dinnae fash, but the burn's near toom",
    "Yon watter's wee an' peely-wally",
    "Ah cannae see a drap in the lade",
    "Nary a drop in the holler crick",
    "T'dyke's fair parched, nobbut clarts",
};

constexpr double kBandWidth = 0.2;
constexpr double kBlurWidth = 0.06;
constexpr double kBlurMax = 0.35;
constexpr double kChatterRate = 0.15;

int band_of(double ratio) {
  return std::clamp(static_cast<int>(std::floor(ratio / kBandWidth + 1e-9)), 0, 4);
}

// Near a band edge, observers sometimes describe the level in the
// neighbouring band's words.
int blurred_band(double ratio, RandomStream& rng) {
  const int band = band_of(ratio);
  const double lower_edge = band * kBandWidth;
  const double upper_edge = (band + 1) * kBandWidth;
  const double d_lower = band > 0 ? ratio - lower_edge : 1.0;
  const double d_upper = band < 4 ? upper_edge - ratio : 1.0;
  const bool toward_lower = d_lower <= d_upper;
  const double d = toward_lower ? d_lower : d_upper;
  const double p = kBlurMax * std::max(0.0, 1.0 - d / kBlurWidth);
  if (rng.uniform() < p) return toward_lower ? band - 1 : band + 1;
  return band;
}

// Some observers mention the canal without saying anything about the level.
const std::vector<std::string_view>& template_bank(int band, RandomStream& rng) {
  if (rng.uniform() < kChatterRate) return kChatter;
  return kBands[static_cast<std::size_t>(band)];
}

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& options, RandomStream& rng) {
  return options[rng.index(N)];
}

std::string render(std::string_view tmpl, RandomStream& rng) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      switch (tmpl[i + 1]) {
        case 'r': out += pick(kRiver, rng); break;
        case 'w': out += pick(kWater, rng); break;
        case 'i': out += pick(kIntensifier, rng); break;
        case 'e': out += pick(kEnding, rng); break;
        default: throw Error("bad template slot");
      }
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  if (rng.uniform() < 0.15) {
    std::string prefix(pick(kPrefix, rng));
    if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    out = prefix + out;
  }
  if (rng.uniform() < 0.2) {
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Split parse_split(std::string_view s, std::size_t line) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw ParseError(line, "unknown split '" + std::string(s) + "'");
}

DomainTag parse_domain(std::string_view s, std::size_t line) {
  if (s == "in_domain") return DomainTag::in_domain;
  if (s == "ood") return DomainTag::ood;
  throw ParseError(line, "unknown domain tag '" + std::string(s) + "'");
}

std::vector<std::string> split_csv_row(std::string_view row, std::size_t line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    std::string field;
    if (i < row.size() && row[i] == '"') {
      ++i;
      bool closed = false;
      while (i < row.size()) {
        if (row[i] == '"') {
          if (i + 1 < row.size() && row[i + 1] == '"') {
            field += '"';
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          field += row[i++];
        }
      }
      if (!closed) throw ParseError(line, "unterminated quoted field");
      if (i < row.size() && row[i] != ',') throw ParseError(line, "junk after quoted field");
    } else {
      while (i < row.size() && row[i] != ',') field += row[i++];
    }
    fields.push_back(std::move(field));
    if (i >= row.size()) break;
    ++i;  // comma
  }
  return fields;
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::string_view to_string(DomainTag d) { return d == DomainTag::ood ? "ood" : "in_domain"; }

std::vector<double> LevelGrid::keys() const {
  if (steps < 1 || !(lo < hi) || lo < 0.0 || hi > 1.0) throw InvalidInput("invalid level grid");
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) out[i] = lo + (hi - lo) * i / steps;
  out.back() = hi;
  return out;
}

Corpus generate_corpus(std::uint64_t seed, const LevelGrid& grid, int texts_per_level) {
  if (texts_per_level < 3) throw InvalidInput("generate_corpus: texts_per_level must be at least 3");
  RandomStream rng(seed, 0x636f72707573ULL);
  Corpus corpus;
  corpus.level_grid = grid.keys();
  corpus.records.reserve(corpus.level_grid.size() * static_cast<std::size_t>(texts_per_level));
  for (double level : corpus.level_grid) {
    for (int j = 0; j < texts_per_level; ++j) {
      const auto& bank = template_bank(blurred_band(level, rng), rng);
      corpus.records.push_back(
          {level, render(bank[rng.index(bank.size())], rng), Split::train, DomainTag::in_domain});
    }
  }
  return corpus;
}

Corpus split_corpus(Corpus corpus, const SplitFractions& f, std::uint64_t seed) {
  const std::array<double, 3> fr = {f.train, f.val, f.test};
  for (double x : fr)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("split fractions must be nonnegative");
  if (std::abs(fr[0] + fr[1] + fr[2] - 1.0) > 1e-9) throw InvalidInput("split fractions must sum to 1");
  const int required = static_cast<int>(std::count_if(fr.begin(), fr.end(), [](double x) { return x > 0.0; }));

  std::map<double, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) by_key[corpus.records[i].level_ratio].push_back(i);

  RandomStream rng(seed, 0x73706c6974ULL);
  constexpr std::array<Split, 3> kSplits = {Split::train, Split::val, Split::test};
  for (auto& [key, idx] : by_key) {
    const auto n = static_cast<int>(idx.size());
    if (n < required)
      throw CorpusError("level " + format_double(key) + " has " + std::to_string(n) +
                        " records, too few to stratify");
    std::shuffle(idx.begin(), idx.end(), rng.engine());

    std::array<int, 3> count{};
    std::array<double, 3> rem{};
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
      const double exact = fr[s] * n;
      count[s] = static_cast<int>(std::floor(exact));
      rem[s] = exact - count[s];
      assigned += count[s];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (int k = 0; assigned < n; k = (k + 1) % 3) {
      if (fr[order[k]] > 0.0) {
        ++count[order[k]];
        ++assigned;
      }
    }
    for (int s = 0; s < 3; ++s) {
      if (fr[s] > 0.0 && count[s] == 0) {
        const int donor = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
        --count[donor];
        ++count[s];
      }
    }
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s)
      for (int c = 0; c < count[s]; ++c) corpus.records[idx[pos++]].split = kSplits[s];
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  out << "level_ratio,text,split,domain_tag\n";
  for (const auto& r : corpus.records) {
    if (r.text.find_first_of("\r\n") != std::string::npos)
      throw CorpusError("record text contains a line break");
    out << format_double(r.level_ratio) << ',' << quote(r.text) << ',' << to_string(r.split) << ','
        << to_string(r.domain) << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  write_corpus(corpus, out);
  if (!out) throw Error("failed writing corpus file " + path.string());
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!header) {
      if (line != "level_ratio,text,split,domain_tag") throw ParseError(lineno, "unexpected header");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_row(line, lineno);
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 fields, got " + std::to_string(fields.size()));
    ObservationRecord r;
    const auto& num = fields[0];
    const auto res = std::from_chars(num.data(), num.data() + num.size(), r.level_ratio);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size())
      throw ParseError(lineno, "bad level_ratio '" + num + "'");
    if (!(r.level_ratio >= 0.0 && r.level_ratio <= 1.0))
      throw ParseError(lineno, "level_ratio " + num + " outside [0, 1]");
    if (fields[1].empty()) throw ParseError(lineno, "empty text");
    r.text = fields[1];
    r.split = parse_split(fields[2], lineno);
    r.domain = parse_domain(fields[3], lineno);
    corpus.records.push_back(std::move(r));
  }
  if (!header) throw ParseError(lineno == 0 ? 1 : lineno, "missing header");
  std::vector<double> grid;
  for (const auto& r : corpus.records) grid.push_back(r.level_ratio);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  corpus.level_grid = std::move(grid);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file " + path.string());
  return read_corpus(in);
}

int label_of(const ObservationRecord& record, const QuantizationScheme& scheme) {
  const double y = record.level_ratio * (scheme.hi() - scheme.lo()) + scheme.lo();
  return quantize(scheme, std::clamp(y, scheme.lo(), scheme.hi()));
}

void check_split_coverage(const Corpus& corpus) {
  std::map<double, std::pair<int, int>> seen;
  for (double k : corpus.level_grid) seen[k] = {0, 0};
  for (const auto& r : corpus.records) {
    if (r.split == Split::train) ++seen[r.level_ratio].first;
    if (r.split == Split::test) ++seen[r.level_ratio].second;
  }
  for (const auto& [k, c] : seen) {
    if (c.first == 0 || c.second == 0)
      throw CorpusError("level " + format_double(k) + " lacks a train or test record");
  }
}

std::vector<const ObservationRecord*> select(const Corpus& corpus, Split split, DomainTag domain) {
  std::vector<const ObservationRecord*> out;
  for (const auto& r : corpus.records)
    if (r.split == split && r.domain == domain) out.push_back(&r);
  return out;
}

std::vector<std::string> load_text_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open text file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::string> builtin_ood_bank() { return kOodBank; }

}  // namespace lapf
