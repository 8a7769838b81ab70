#pragma once

#include <string>
#include <vector>

#include "wgsim/grid.hpp"

namespace wgsim {

// Eigenstate of the linear potential m a x above a wall at x = 0, with complex
// energy E - i Gamma/2.
struct QuasiBoundState {
    int n = 0;
    double E = 0.0;       // J
    double Gamma = 0.0;   // J
    double omega = 0.0;   // 2 pi / classical bounce period, 1/s
    double x_turn = 0.0;  // E/(m a), m
    double eps = 0.0;     // E / E_c
    bool populated = true;
    std::size_t support = 0;  // psi vanishes for indices >= support
    std::vector<cplx> psi;    // unit-normalized on the grid: integral psi^2 dx = 1
};

struct StateSet {
    HeightGrid grid;
    double mass = 0.0;
    double a = 0.0;
    double dH = 0.0;                    // second wall height (two-wall sets), else 0
    cplx wall_length{0.0, 0.0};         // complex scattering length of the mirror
    std::vector<QuasiBoundState> states;
    std::string diagnostic;

    std::size_t size() const { return states.size(); }
    bool two_wall() const { return dH > 0.0; }
};

// Grid requirements for states up to energy E_max: at least 16 points per de Broglie
// wavelength at the mirror, and x_max >= x_needed (or E_max/(m a) + 8 l when
// x_needed is 0). Throws ValidationError naming the suggested number of points.
void check_grid(const HeightGrid& grid, double mass, double a, double E_max, double x_needed);

// Single wall at x = 0. wall_length = a_r - i b shifts the effective wall to x = a_s
// (to first order in a_s/l): E gains m a a_r and the width 2 m a b, and
// psi = psi0 - a_s psi0'. Zero wall_length gives the hard wall.
StateSet solve_single_wall(double mass, double a, int n_max, const HeightGrid& grid,
                           cplx wall_length = {0.0, 0.0});

// Hard walls at x = 0 and x = dH. Returns the lowest n_max states; states whose
// turning point is at or above dH are flagged populated = false. A slit narrower
// than half the gravitational ground state returns no states (with a diagnostic)
// unless allow_narrow is set, which is how the box limit is reached.
StateSet solve_two_wall(double mass, double a, double dH, int n_max, const HeightGrid& grid,
                        bool allow_narrow = false);

// Gamma_n = hbar omega_n P_n with the WKB factor P_n = exp(-(4/3) (dH/l - eps_n)^{3/2})
// for x_turn < dH; states at or above dH are unpopulated.
void absorber_widths(StateSet& set, double dH);

// WKB barrier factor for state energy E under a slit of height dH.
double wkb_barrier_factor(double mass, double a, double E, double dH);

// Classical bounce angular frequency pi m a / sqrt(2 m E).
double bounce_frequency(double mass, double a, double E);

// Number of single-wall states with turning point below dH.
int count_states_below(double mass, double a, double dH);

}  // namespace wgsim
