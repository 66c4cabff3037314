#pragma once

#include <string>

namespace szego {

// 17 significant digits, '.' decimal separator; round-trips any double.
std::string format_double(double x);
// Two decimals, used for column labels such as hs_sq_1.00.
std::string format_label(double x);

}  // namespace szego
