#pragma once

#include <string>

namespace inharmonica::detail {

// Shortest decimal form that round-trips a double exactly ("%.17g").
std::string format_full(double value);

}  // namespace inharmonica::detail
