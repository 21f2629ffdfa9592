#pragma once

#include <cstddef>
#include <utility>

#include "hopfspec/errors.hpp"

namespace hopfspec {

/// Composite Simpson rule on [a, b] with n panels (n even, n >= 2).
template <typename F>
double simpson(F&& f, double a, double b, std::size_t n) {
    if (n < 2 || (n % 2) != 0) {
        throw ConfigError("simpson: panel count must be even and >= 2");
    }
    const double h = (b - a) / static_cast<double>(n);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
    for (std::size_t i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

} // namespace hopfspec
