#include "wgsim/packet.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

using constants::hbar;

WavePacket plane_wave(const HeightGrid& grid, double dH, double k_perp, double v) {
    const std::size_t top = grid.node_index(dH);
    if (top == HeightGrid::npos) throw ValidationError("plane_wave: dH must fall on a grid node");
    WavePacket p;
    p.grid = grid;
    p.v = v;
    p.psi.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i <= top; ++i) p.psi[i] = std::polar(1.0, k_perp * grid.x(i));
    const double n = norm(p);
    for (auto& z : p.psi) z /= std::sqrt(n);
    return p;
}

double norm(const WavePacket& p) {
    std::vector<double> a(p.psi.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::norm(p.psi[i]);
    return simpson(a.data(), a.size(), p.grid.spacing());
}

std::vector<cplx> project(const WavePacket& p, const StateSet& set, bool include_unpopulated) {
    if (!(p.grid == set.grid)) throw ValidationError("project: packet and states use different grids");
    std::vector<cplx> c(set.size(), 0.0);
    std::vector<cplx> prod(p.psi.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto& st = set.states[k];
        if (!st.populated && !include_unpopulated) continue;
        for (std::size_t i = 0; i < st.support; ++i) prod[i] = p.psi[i] * st.psi[i];
        c[k] = simpson(prod.data(), st.support, p.grid.spacing());
    }
    return c;
}

std::vector<cplx> evolve_amplitudes(const StateSet& set, const std::vector<cplx>& c, double dt,
                                    double lifetime) {
    if (!(dt >= 0.0)) throw ValidationError("evolve: t must be >= 0");
    if (c.size() != set.size()) throw ValidationError("evolve: amplitude count mismatch");
    const double decay = std::isinf(lifetime) ? 1.0 : std::exp(-dt / (2.0 * lifetime));
    std::vector<cplx> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto& st = set.states[k];
        const cplx phase = std::exp(cplx(-st.Gamma * dt / (2.0 * hbar), -st.E * dt / hbar));
        out[k] = c[k] * phase * decay;
    }
    return out;
}

WavePacket synthesize(const StateSet& set, const std::vector<cplx>& c, double v, double t) {
    if (c.size() != set.size()) throw ValidationError("synthesize: amplitude count mismatch");
    WavePacket p;
    p.grid = set.grid;
    p.v = v;
    p.t = t;
    p.psi.assign(set.grid.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == cplx(0.0, 0.0)) continue;
        const auto& st = set.states[k];
        for (std::size_t i = 0; i < st.support; ++i) p.psi[i] += c[k] * st.psi[i];
    }
    return p;
}

WavePacket evolve(const StateSet& set, const std::vector<cplx>& c, double dt, double v,
                  double lifetime, double t0) {
    return synthesize(set, evolve_amplitudes(set, c, dt, lifetime), v, t0 + dt);
}

std::vector<cplx> sudden_transition(const WavePacket& p, const StateSet& new_set) {
    return project(p, new_set, true);
}

void write_packet(std::ostream& os, const WavePacket& p,
                  const std::map<std::string, std::string>& meta) {
    os << "# format: wgsim-packet-1\n";
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "# v_m_s: %.17g\n# t_s: %.17g\n", p.v, p.t);
    os << buf << "x_m,re_psi,im_psi\n";
    for (std::size_t i = 0; i < p.psi.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.grid.x(i), p.psi[i].real(),
                      p.psi[i].imag());
        os << buf;
    }
}

WavePacket read_packet(std::istream& is) {
    WavePacket p;
    std::string line;
    std::vector<double> xs;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            double val;
            if (std::sscanf(line.c_str(), "# v_m_s: %lf", &val) == 1) p.v = val;
            if (std::sscanf(line.c_str(), "# t_s: %lf", &val) == 1) p.t = val;
            continue;
        }
        if (!header) {
            if (line != "x_m,re_psi,im_psi")
                throw ValidationError("packet file line " + std::to_string(lineno) +
                                      ": expected column header");
            header = true;
            continue;
        }
        double x, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
            throw ValidationError("packet file line " + std::to_string(lineno) + ": bad row");
        xs.push_back(x);
        p.psi.emplace_back(re, im);
    }
    if (xs.size() < 3) throw ValidationError("packet file: too few rows");
    p.grid = HeightGrid(xs.back(), xs.size());
    return p;
}

void write_state(std::ostream& os, const StateSet& set, std::size_t index) {
    const auto& st = set.states.at(index);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "# n: %d\n# E_J: %.17g\n# Gamma_J: %.17g\n# omega_1_s: %.17g\n# x_turn_m: "
                  "%.17g\n# populated: %s\n",
                  st.n, st.E, st.Gamma, st.omega, st.x_turn, st.populated ? "true" : "false");
    WavePacket p{set.grid, st.psi, 0.0, 0.0};
    std::ostringstream hdr;
    hdr << buf;
    os << hdr.str();
    write_packet(os, p);
}

}  // namespace wgsim
