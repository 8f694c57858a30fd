#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace decarb {

// All budget arithmetic is carried in integer cents so feasibility checks
// are exact.
using Money = std::int64_t;

inline Money dollars_to_cents(double usd) {
    return static_cast<Money>(std::llround(usd * 100.0));
}

inline double cents_to_dollars(Money cents) { return static_cast<double>(cents) / 100.0; }

std::string format_usd(Money cents);

} // namespace decarb
