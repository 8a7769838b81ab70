#pragma once

#include <cmath>
#include <string>

#include "wgsim/particle.hpp"
#include "wgsim/qr_model.hpp"

namespace support {

// Rounds x to n significant figures.
inline double sig_round(double x, int n) {
    if (x == 0.0) return 0.0;
    const double p = std::pow(10.0, n - 1 - static_cast<int>(std::floor(std::log10(std::abs(x)))));
    return std::round(x * p) / p;
}

// True when x, rounded to the figures carried by the quoted value, equals it.
inline bool matches_quoted(double x, double quoted, int figures) {
    return std::abs(sig_round(x, figures) - quoted) <= 1e-9 * std::abs(quoted);
}

inline wgsim::QRModel table(const std::string& name) {
    return wgsim::QRModel::load_table(std::string(WGSIM_DATA_DIR) + "/qr/" + name);
}

inline const wgsim::ParticleSpec& particle(const std::string& name) {
    return wgsim::default_catalog().get(name);
}

}  // namespace support
