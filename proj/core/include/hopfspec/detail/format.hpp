#pragma once

#include <cstdio>
#include <string>

namespace hopfspec::detail {

/// Full double precision decimal (17 significant digits).
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace hopfspec::detail
