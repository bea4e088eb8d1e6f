#include "lapf/cli.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace lapf {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_step(const StepSummary& s, std::ostream& out) {
  out << "step " << s.step << " estimate";
  for (Index i = 0; i < s.estimate.size(); ++i) out << ' ' << fixed(s.estimate(i));
  out << " ess " << fixed(s.ess);
}

}  // namespace

void run_interactive(LanguageAidedFilter& filter, std::istream& in, std::ostream& out) {
  print_step(filter.prior_summary(), out);
  out << '\n' << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string texts[] = {line};
    print_step(filter.step(texts), out);
    for (const auto& r : filter.last_readings()) {
      if (r.label_distribution.size() == 0) continue;
      out << " p(q|s)";
      for (Index j = 0; j < r.label_distribution.size(); ++j) out << ' ' << fixed(r.label_distribution(j));
    }
    out << '\n' << std::flush;
  }
}

}  // namespace lapf
