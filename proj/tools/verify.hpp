#pragma once

#include <ostream>

namespace mallows::cli {

/// Runs the library's invariant suite, printing one pass/fail line per
/// check. Returns the number of failed checks.
int run_verification(std::ostream& os);

}  // namespace mallows::cli
