#pragma once

#include <string>

namespace odefilter {

/// %.17g rendering used for CSV cells; `inf`, `-inf`, `nan` for non-finite values.
[[nodiscard]] std::string format_double(double value);

/// Shortest text that parses back to the same double (config files, labels).
[[nodiscard]] std::string format_shortest(double value);

}  // namespace odefilter
