#pragma once

#include <iosfwd>

namespace ssflab::lab
{

/// Quick worked-example suite. One PASS/FAIL line per case; returns 0 when
/// everything passes, 2 otherwise.
int run_selftest(std::ostream& out);

} // namespace ssflab::lab
