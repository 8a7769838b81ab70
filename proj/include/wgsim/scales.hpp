#pragma once

#include "wgsim/particle.hpp"

namespace wgsim {

// Energy, height and time scales of a particle of mass m in a uniform
// acceleration a near a reflecting wall:
//   E = (hbar^2 m a^2 / 2)^(1/3),  l = E/(m a),  tau = hbar/E.
struct CharacteristicScales {
    double E = 0.0;    // J
    double l = 0.0;    // m
    double tau = 0.0;  // s
    double a = 0.0;    // m/s^2
};

CharacteristicScales characteristic_scales(double mass, double a);
inline CharacteristicScales characteristic_scales(const ParticleSpec& p, double a) {
    return characteristic_scales(p.mass, a);
}

// a = v^2 / R
double centrifugal_acceleration(double v, double R);

// Acceleration whose characteristic time is tau: a = sqrt(2 hbar / (m tau^3)).
double acceleration_for_time(double mass, double tau);

// Acceleration whose characteristic energy is E: a = sqrt(2 E^3 / (hbar^2 m)).
double acceleration_for_energy(double mass, double E);

}  // namespace wgsim
