#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fishsim {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    double r = std::remainder(theta, 2.0 * kPi);
    if (r >= kPi) r -= 2.0 * kPi;   // remainder may return exactly +pi
    if (r < -kPi) r += 2.0 * kPi;
    return r;
}

}  // namespace fishsim
