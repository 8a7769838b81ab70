#include "wgsim/states.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "wgsim/airy.hpp"
#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/scales.hpp"

namespace wgsim {

using constants::hbar;
using constants::pi;

double bounce_frequency(double mass, double a, double E) {
    return pi * mass * a / std::sqrt(2.0 * mass * E);
}

double wkb_barrier_factor(double mass, double a, double E, double dH) {
    const auto s = characteristic_scales(mass, a);
    const double d = dH / s.l - E / s.E;
    if (d <= 0.0) return 1.0;
    return std::exp(-4.0 / 3.0 * d * std::sqrt(d));
}

int count_states_below(double mass, double a, double dH) {
    const auto s = characteristic_scales(mass, a);
    const double lim = dH / s.l;
    if (lim <= 0.0) return 0;
    const int guess = static_cast<int>((8.0 * lim * std::sqrt(lim) / (3.0 * pi) + 1.0) / 4.0) + 3;
    const auto z = airy_ai_zeros(guess);
    int n = 0;
    while (n < guess && z[n] < lim) ++n;
    return n;
}

void check_grid(const HeightGrid& grid, double mass, double a, double E_max, double x_needed) {
    const auto s = characteristic_scales(mass, a);
    const double k = std::sqrt(2.0 * mass * E_max) / hbar;
    const double h_need = 2.0 * pi / k / 16.0;
    std::ostringstream msg;
    if (grid.spacing() > h_need) {
        const auto suggest = static_cast<std::size_t>(std::ceil(grid.x_max() / h_need)) + 1;
        msg << "grid too coarse: spacing " << grid.spacing() << " m exceeds 1/16 of the "
            << "de Broglie wavelength (" << h_need << " m); use n_points >= " << suggest;
        throw ValidationError(msg.str());
    }
    const double x_req = x_needed > 0.0 ? x_needed : E_max / (mass * a) + 8.0 * s.l;
    if (grid.x_max() < x_req * (1 - 1e-12)) {
        const auto suggest = static_cast<std::size_t>(std::ceil(x_req / grid.spacing())) + 1;
        msg << "grid too short: x_max " << grid.x_max() << " m < " << x_req
            << " m (turning point + 8 l); use n_points >= " << suggest
            << " at the same spacing";
        throw ValidationError(msg.str());
    }
}

namespace {

void normalize(QuasiBoundState& st, const HeightGrid& g) {
    std::vector<cplx> sq(st.support);
    for (std::size_t i = 0; i < st.support; ++i) sq[i] = st.psi[i] * st.psi[i];
    const cplx n2 = simpson(sq.data(), st.support, g.spacing());
    const cplx inv = 1.0 / std::sqrt(n2);
    for (auto& p : st.psi) p *= inv;
}

// Two-wall secular function, scaled by Bi(max(xi_H, 0)) > 0 so it stays finite.
double two_wall_secular(double eps, double xiH0) {
    const double xiH = xiH0 - eps;
    const auto b = airy(-eps);
    if (xiH > 0.0) {
        const auto t = airy_scaled(xiH);
        const double rho = t.ai / t.bi * std::exp(-4.0 / 3.0 * xiH * std::sqrt(xiH));
        return b.ai - rho * b.bi;
    }
    const auto t = airy(xiH);
    static const double bi0 = airy(0.0).bi;
    return (b.ai * t.bi - b.bi * t.ai) / bi0;
}

}  // namespace

StateSet solve_single_wall(double mass, double a, int n_max, const HeightGrid& grid, cplx wall) {
    if (!(a > 0.0)) throw ValidationError("solve_single_wall: acceleration must be > 0");
    if (n_max < 1) throw ValidationError("solve_single_wall: n_max must be >= 1");
    if (wall.imag() > 0.0) throw ValidationError("solve_single_wall: Im(wall length) must be <= 0");
    const auto s = characteristic_scales(mass, a);
    const auto zeros = airy_ai_zeros(n_max);
    check_grid(grid, mass, a, s.E * zeros.back(), 0.0);

    StateSet set;
    set.grid = grid;
    set.mass = mass;
    set.a = a;
    set.wall_length = wall;
    for (int n = 1; n <= n_max; ++n) {
        QuasiBoundState st;
        st.n = n;
        st.eps = zeros[n - 1];
        st.E = s.E * st.eps + mass * a * wall.real();
        st.Gamma = -2.0 * mass * a * wall.imag();
        st.x_turn = st.E / (mass * a);
        st.omega = bounce_frequency(mass, a, s.E * st.eps);
        st.support = grid.size();
        st.psi.resize(grid.size());
        const cplx shift = wall / s.l;  // psi = Ai(xi) - (a_s/l) Ai'(xi)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto v = airy(grid.x(i) / s.l - st.eps);
            st.psi[i] = v.ai - shift * v.aip;
        }
        if (wall == cplx(0.0, 0.0)) st.psi[0] = 0.0;
        // sign convention: psi'(0) > 0 for the unperturbed part
        if (airy(-st.eps).aip < 0)
            for (auto& p : st.psi) p = -p;
        normalize(st, grid);
        set.states.push_back(std::move(st));
    }
    return set;
}

StateSet solve_two_wall(double mass, double a, double dH, int n_max, const HeightGrid& grid,
                        bool allow_narrow) {
    if (!(dH > 0.0)) throw ValidationError("solve_two_wall: dH must be > 0");
    if (!(a > 0.0)) throw ValidationError("solve_two_wall: acceleration must be > 0");
    if (n_max < 1) throw ValidationError("solve_two_wall: n_max must be >= 1");
    const auto s = characteristic_scales(mass, a);
    StateSet set;
    set.grid = grid;
    set.mass = mass;
    set.a = a;
    set.dH = dH;
    const double lambda1 = 2.338107410459767;
    if (dH < 0.5 * lambda1 * s.l && !allow_narrow) {
        set.diagnostic = "dH below half the ground-state size; no states";
        return set;
    }
    const std::size_t top = grid.node_index(dH);
    if (top == HeightGrid::npos || top % 2)
        throw ValidationError("solve_two_wall: dH must fall on an even grid node");

    const double xiH0 = dH / s.l;
    std::vector<double> roots;
    double e0 = 0.0, f0 = two_wall_secular(e0, xiH0);
    while (static_cast<int>(roots.size()) < n_max) {
        // the WKB phase of g advances at rate sqrt(e) - sqrt(e - xiH) per unit energy
        const double ep = e0 + 1.0;
        const double rate = std::sqrt(ep) - std::sqrt(std::max(ep - xiH0, 0.0));
        const double step = 0.1 * pi / rate;
        const double e1 = e0 + step;
        const double f1 = two_wall_secular(e1, xiH0);
        if (f0 == 0.0) {
            roots.push_back(e0);
        } else if (f0 * f1 < 0.0) {
            boost::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve(
                [&](double e) { return two_wall_secular(e, xiH0); }, e0, e1, f0, f1,
                boost::math::tools::eps_tolerance<double>(50), it);
            roots.push_back(0.5 * (r.first + r.second));
        }
        e0 = e1;
        f0 = f1;
        if (e0 > 1e12) throw NumericalError("solve_two_wall: root scan diverged");
    }
    check_grid(grid, mass, a, s.E * roots.back(), dH);

    for (int n = 1; n <= n_max; ++n) {
        QuasiBoundState st;
        st.n = n;
        st.eps = roots[n - 1];
        st.E = s.E * st.eps;
        st.x_turn = st.E / (mass * a);
        st.omega = bounce_frequency(mass, a, st.E);
        st.populated = st.x_turn < dH;
        st.support = top + 1;
        st.psi.assign(grid.size(), 0.0);
        const double xiH = xiH0 - st.eps;
        if (xiH > 0.0) {
            // psi = Ai(xi) - rho Bi(xi), vanishing at the top wall by construction
            const auto t = airy_scaled(xiH);
            const double zH = 2.0 / 3.0 * xiH * std::sqrt(xiH);
            const double log_rho_s = std::log(std::abs(t.ai / t.bi)) - 2.0 * zH;
            const double sgn = (t.ai / t.bi) < 0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < top; ++i) {
                const double xi = grid.x(i) / s.l - st.eps;
                if (xi > 0.0) {
                    const auto v = airy_scaled(xi);
                    const double z = 2.0 / 3.0 * xi * std::sqrt(xi);
                    const double ai = v.ai * std::exp(-z);
                    const double bi = sgn * v.bi * std::exp(z + log_rho_s);
                    st.psi[i] = ai - bi;
                } else {
                    const auto v = airy(xi);
                    st.psi[i] = v.ai - sgn * v.bi * std::exp(log_rho_s);
                }
            }
        } else {
            const auto b = airy(-st.eps);
            for (std::size_t i = 0; i < top; ++i) {
                const auto v = airy(grid.x(i) / s.l - st.eps);
                st.psi[i] = b.bi * v.ai - b.ai * v.bi;
            }
        }
        st.psi[0] = 0.0;
        st.psi[top] = 0.0;
        // sign convention: positive slope at the mirror
        if (st.psi[1].real() < 0)
            for (auto& p : st.psi) p = -p;
        normalize(st, grid);
        set.states.push_back(std::move(st));
    }
    return set;
}

void absorber_widths(StateSet& set, double dH) {
    for (auto& st : set.states) {
        st.populated = st.x_turn < dH;
        const double P = wkb_barrier_factor(set.mass, set.a, st.E, dH);
        st.Gamma = hbar * st.omega * P;
    }
}

}  // namespace wgsim
