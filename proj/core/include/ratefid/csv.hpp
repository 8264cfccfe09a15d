#ifndef RATEFID_CSV_HPP
#define RATEFID_CSV_HPP

#include <string>

namespace ratefid {

/// Locale-independent decimal rendering with 12 significant digits
/// ('.' decimal point, no grouping), as used in every CSV this tool emits.
std::string format_number(double value);

std::string format_integer(long long value);

}  // namespace ratefid

#endif  // RATEFID_CSV_HPP
