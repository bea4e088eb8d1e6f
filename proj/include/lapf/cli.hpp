#pragma once

#include "lapf/filter.hpp"

#include <iosfwd>

namespace lapf {

/// Reads one text per line and advances the filter one step per line. Prints
/// the prior estimate first, then the estimate and label distribution of
/// every step. Blank lines are skipped. Returns when the input ends.
void run_interactive(LanguageAidedFilter& filter, std::istream& in, std::ostream& out);

namespace cli {

/// Entry point of the `lapf` tool. Returns 0 on success, 1 on a runtime
/// failure and 2 on a usage or configuration error.
int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace lapf
