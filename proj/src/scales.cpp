#include "wgsim/scales.hpp"

#include <cmath>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

using constants::hbar;

CharacteristicScales characteristic_scales(double mass, double a) {
    if (!(mass > 0.0)) throw ValidationError("characteristic_scales: mass must be positive");
    if (!(a > 0.0) || !std::isfinite(a))
        throw ValidationError("characteristic_scales: acceleration must be positive");
    CharacteristicScales s;
    s.a = a;
    s.E = std::cbrt(hbar * hbar * mass * a * a / 2.0);
    s.l = s.E / (mass * a);
    s.tau = hbar / s.E;
    return s;
}

double centrifugal_acceleration(double v, double R) {
    if (!(v >= 0.0)) throw ValidationError("centrifugal_acceleration: v must be >= 0");
    if (!(R > 0.0)) throw ValidationError("centrifugal_acceleration: R must be positive");
    return v * v / R;
}

double acceleration_for_time(double mass, double tau) {
    if (!(tau > 0.0) || !(mass > 0.0))
        throw ValidationError("acceleration_for_time: mass and tau must be positive");
    return std::sqrt(2.0 * hbar / (mass * tau * tau * tau));
}

double acceleration_for_energy(double mass, double E) {
    if (!(E > 0.0) || !(mass > 0.0))
        throw ValidationError("acceleration_for_energy: mass and E must be positive");
    return std::sqrt(2.0 * E * E * E / (hbar * hbar * mass));
}

}  // namespace wgsim
