#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wgsim/states.hpp"

namespace wgsim {

struct WavePacket {
    HeightGrid grid;
    std::vector<cplx> psi;
    double v = 0.0;  // longitudinal velocity, m/s
    double t = 0.0;  // elapsed time since the mirror entrance, s
};

// exp(i k_perp x) on [0, dH], zero above, unit-normalized.
WavePacket plane_wave(const HeightGrid& grid, double dH, double k_perp, double v);

// Integral |psi|^2 dx (composite Simpson).
double norm(const WavePacket& p);

// c_i = integral psi(x) psi_i(x) dx, no conjugation on psi_i. Unpopulated states get
// c_i = 0 unless include_unpopulated is set.
std::vector<cplx> project(const WavePacket& p, const StateSet& set, bool include_unpopulated = false);

// Amplitudes after dt: c_i exp(-i E_i dt/hbar - Gamma_i dt/(2 hbar)), times
// exp(-dt/(2 lifetime)) for a decaying particle.
std::vector<cplx> evolve_amplitudes(const StateSet& set, const std::vector<cplx>& c, double dt,
                                    double lifetime = std::numeric_limits<double>::infinity());

// sum_i c_i psi_i(x)
WavePacket synthesize(const StateSet& set, const std::vector<cplx>& c, double v, double t);

// synthesize(evolve_amplitudes(...)) with packet time t0 + dt.
WavePacket evolve(const StateSet& set, const std::vector<cplx>& c, double dt, double v,
                  double lifetime = std::numeric_limits<double>::infinity(), double t0 = 0.0);

// Re-projection of a packet onto a new basis at a junction.
std::vector<cplx> sudden_transition(const WavePacket& p, const StateSet& new_set);

// Columnar text: '#' metadata lines, then "x_m,re_psi,im_psi" rows.
void write_packet(std::ostream& os, const WavePacket& p,
                  const std::map<std::string, std::string>& meta = {});
WavePacket read_packet(std::istream& is);
void write_state(std::ostream& os, const StateSet& set, std::size_t index);

}  // namespace wgsim
