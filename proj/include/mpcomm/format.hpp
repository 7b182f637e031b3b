#pragma once

#include <string>

namespace mpcomm {

/// Shortest "%.9g" text of a double (CSV and console output).
std::string fmt9(double x);
/// "%.17g" text; parses back to the identical double.
std::string fmt17(double x);

}  // namespace mpcomm
