#include "decarb/money.hpp"

#include <cstdio>

namespace decarb {

std::string format_usd(Money cents) {
    const bool negative = cents < 0;
    const Money abs = negative ? -cents : cents;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "",
                  static_cast<long long>(abs / 100), static_cast<long long>(abs % 100));
    return buf;
}

} // namespace decarb
