#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "oracles.hpp"
#include "support.hpp"
#include "wgsim/airy.hpp"
#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/scales.hpp"
#include "wgsim/states.hpp"

using namespace wgsim;
using constants::eV;
using constants::hbar;

namespace {

const double g = constants::standard_gravity;
const double mn = constants::neutron_mass;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

HeightGrid grid_for(double mass, double a, double x_extent, double per_l) {
    const auto s = characteristic_scales(mass, a);
    return HeightGrid(x_extent, static_cast<std::size_t>(x_extent / s.l * per_l) + 1);
}

// ||(H - E) psi|| / ||E psi|| on interior nodes, sixth-order central second derivative.
double residual(const StateSet& set, const QuasiBoundState& st) {
    const double h = set.grid.spacing();
    const double c = hbar * hbar / (2 * set.mass);
    double num = 0, den = 0;
    const std::size_t end = st.support - 3;
    for (std::size_t i = 3; i < end; ++i) {
        const auto& p = st.psi;
        const cplx d2 = (2.0 * p[i - 3] - 27.0 * p[i - 2] + 270.0 * p[i - 1] - 490.0 * p[i] +
                         270.0 * p[i + 1] - 27.0 * p[i + 2] + 2.0 * p[i + 3]) /
                        (180.0 * h * h);
        const cplx Hpsi = -c * d2 + set.mass * set.a * set.grid.x(i) * p[i];
        num += std::norm(Hpsi - st.E * p[i]);
        den += std::norm(st.E * p[i]);
    }
    return std::sqrt(num / den);
}

// Two-wall levels from Boost Airy functions and Boost root bracketing only.
double boost_two_wall_eps(double xiH, int n) {
    namespace bm = boost::math;
    auto f = [&](double e) {
        return bm::airy_ai(-e) * bm::airy_bi(xiH - e) - bm::airy_bi(-e) * bm::airy_ai(xiH - e);
    };
    int found = 0;
    double e0 = 0.0, f0 = f(e0);
    for (;;) {
        const double e1 = e0 + 1e-3;
        const double f1 = f(e1);
        if (f0 * f1 < 0 && ++found == n) {
            boost::uintmax_t it = 200;
            auto r = bm::tools::toms748_solve(f, e0, e1, f0, f1, bm::tools::eps_tolerance<double>(52), it);
            return 0.5 * (r.first + r.second);
        }
        e0 = e1;
        f0 = f1;
    }
}

}  // namespace

TEST_CASE("neutron ground state at g") {
    const auto s = characteristic_scales(mn, g);
    const auto set = solve_single_wall(mn, g, 1, grid_for(mn, g, 12 * s.l, 40));
    CHECK(set.states[0].E / eV == doctest::Approx(1.4e-12).epsilon(0.02));
    CHECK(set.states[0].E / s.E == doctest::Approx(2.338107410459767).epsilon(1e-13));
}

TEST_CASE("single-wall levels against finite-difference diagonalization") {
    struct Case { const char* name; double a; };
    for (const auto& c : {Case{"n", g}, Case{"H", 90.0}, Case{"Hbar", 5441.0}, Case{"Mu", 1e6},
                          Case{"Ps33", 1.786e6}}) {
        const double m = support::particle(c.name).mass;
        const auto s = characteristic_scales(m, c.a);
        const double top = (12.83 + 12.0) * s.l;
        const auto set = solve_single_wall(m, c.a, 10, grid_for(m, c.a, top, 40));
        const auto fd = oracle::fd_levels(m, c.a, top, s.l / 40, 10);
        for (int n = 0; n < 10; ++n) CHECK(rel(set.states[n].E, fd[n]) < 1e-4);
    }
}

TEST_CASE("single-wall invariants") {
    const auto s = characteristic_scales(mn, g);
    const auto set = solve_single_wall(mn, g, 10, grid_for(mn, g, 22 * s.l, 60));
    double prev = 0;
    for (const auto& st : set.states) {
        std::vector<double> sq(st.psi.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(st.psi[i]);
        CHECK(std::abs(simpson(sq.data(), sq.size(), set.grid.spacing()) - 1.0) < 1e-10);
        CHECK(st.psi[0] == cplx(0.0, 0.0));
        CHECK(st.E > prev);
        prev = st.E;
        CHECK(st.Gamma == 0.0);
        CHECK(residual(set, st) < 1e-6);
        CHECK(st.psi[1].real() > 0.0);
        // omega = 2 pi / (2 sqrt(2E/m) / a)
        CHECK(rel(st.omega, 2 * M_PI * g / (2 * std::sqrt(2 * st.E / mn))) < 1e-12);
    }
}

TEST_CASE("energies scale by 4 under a -> 8a") {
    const auto s = characteristic_scales(mn, 8 * g);
    const auto a1 = solve_single_wall(mn, g, 5, grid_for(mn, g, 40 * s.l, 60));
    const auto a8 = solve_single_wall(mn, 8 * g, 5, grid_for(mn, 8 * g, 40 * s.l, 60));
    for (int n = 0; n < 5; ++n) CHECK(rel(a8.states[n].E, 4 * a1.states[n].E) < 1e-12);
}

TEST_CASE("grid refinement leaves energies unchanged") {
    const auto s = characteristic_scales(mn, g);
    const auto c = solve_two_wall(mn, g, 40e-6, 6, HeightGrid::with_node(40e-6, s.l / 30, 40e-6));
    const auto f = solve_two_wall(mn, g, 40e-6, 6, HeightGrid::with_node(40e-6, s.l / 60, 40e-6));
    for (int n = 0; n < 6; ++n) CHECK(rel(c.states[n].E, f.states[n].E) < 1e-8);
}

TEST_CASE("coarse grids are refused with a suggestion") {
    const auto s = characteristic_scales(mn, g);
    try {
        solve_single_wall(mn, g, 10, HeightGrid(25 * s.l, 60));
        FAIL("expected throw");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("n_points >=") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_single_wall(mn, g, 10, grid_for(mn, g, 15 * s.l, 40)), ValidationError);
    CHECK_THROWS_AS(solve_single_wall(mn, -g, 1, grid_for(mn, g, 15 * s.l, 40)), ValidationError);
}

TEST_CASE("complex wall length: shift and width") {
    const double m = support::particle("Hbar").mass, a = 5441.0;
    const auto s = characteristic_scales(m, a);
    const cplx as(2e-9, -1.1076e-8);
    const auto grid = grid_for(m, a, 25 * s.l, 60);
    const auto set = solve_single_wall(m, a, 5, grid, as);
    const auto ref = solve_single_wall(m, a, 5, grid);
    for (int n = 0; n < 5; ++n) {
        const auto& st = set.states[n];
        CHECK(rel(st.E, ref.states[n].E + m * a * as.real()) < 1e-12);
        CHECK(rel(st.Gamma, -2 * m * a * as.imag()) < 1e-12);
        // boundary condition psi(0) + a_s psi'(0) = 0 (exact for the first-order form)
        const double h = grid.spacing();
        const auto& p = st.psi;
        const cplx d = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12 * h);
        CHECK(std::abs(p[0] + as * d) < 1e-5 * std::abs(p[0]));
    }
}

TEST_CASE("two-wall: large dH converges to single wall") {
    const auto s = characteristic_scales(mn, g);
    const int n = 4;
    const double xt = 6.79 * s.l;
    const double dH = 12 * xt;
    const auto two = solve_two_wall(mn, g, dH, n, HeightGrid::with_node(dH, s.l / 20, dH));
    const auto one = solve_single_wall(mn, g, n, grid_for(mn, g, xt + 9 * s.l, 20));
    for (int i = 0; i < n; ++i) CHECK(rel(two.states[i].E, one.states[i].E) < 1e-8);
}

TEST_CASE("two-wall: box limit") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 0.02 * s.l;
    const auto set = solve_two_wall(mn, g, dH, 3, HeightGrid::with_node(dH, dH / 200, dH), true);
    for (int n = 1; n <= 3; ++n) {
        const double box = n * n * M_PI * M_PI * hbar * hbar / (2 * mn * dH * dH);
        CHECK(rel(set.states[n - 1].E, box) < 1e-6);
    }
}

TEST_CASE("two-wall: 40 um slit holds three populated states") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 40e-6;
    const auto set = solve_two_wall(mn, g, dH, 8, HeightGrid::with_node(dH, s.l / 40, dH));
    int populated = 0;
    for (const auto& st : set.states) populated += st.populated;
    // oracle: Airy zeros below dH / l at l = 5.9 um
    const auto z = airy_ai_zeros(10);
    int count = 0;
    for (double lam : z) count += lam * 5.9e-6 < dH;
    CHECK(count == 3);
    CHECK(populated == count);
}

TEST_CASE("two-wall invariants") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 40e-6;
    const auto set = solve_two_wall(mn, g, dH, 8, HeightGrid::with_node(dH, s.l / 60, dH));
    const std::size_t top = set.grid.node_index(dH);
    double prev = 0;
    for (const auto& st : set.states) {
        std::vector<double> sq(st.support);
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(st.psi[i]);
        CHECK(std::abs(simpson(sq.data(), sq.size(), set.grid.spacing()) - 1.0) < 1e-10);
        CHECK(st.psi[0] == cplx(0.0, 0.0));
        CHECK(st.psi[top] == cplx(0.0, 0.0));
        CHECK(st.E > prev);
        prev = st.E;
        CHECK(residual(set, st) < 1e-6);
        CHECK(st.populated == (st.x_turn < dH));
    }
}

TEST_CASE("two-wall levels against an independent Boost root finder") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 40e-6;
    const auto set = solve_two_wall(mn, g, dH, 5, HeightGrid::with_node(dH, s.l / 40, dH));
    for (int n = 1; n <= 5; ++n)
        CHECK(rel(set.states[n - 1].eps, boost_two_wall_eps(dH / s.l, n)) < 1e-11);
}

TEST_CASE("two-wall below half the ground-state size returns a diagnostic") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 0.4 * 2.338 * s.l;
    const auto set = solve_two_wall(mn, g, dH, 3, HeightGrid::with_node(dH, s.l / 40, dH));
    CHECK(set.states.empty());
    CHECK_FALSE(set.diagnostic.empty());
}

TEST_CASE("absorber widths") {
    const auto s = characteristic_scales(mn, g);
    const double dH = 40e-6;
    auto set = solve_two_wall(mn, g, dH, 5, HeightGrid::with_node(dH, s.l / 40, dH));
    absorber_widths(set, dH);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& st = set.states[i];
        const double P = oracle::wkb_factor_quadrature(mn, g, st.E, dH);
        CHECK(rel(st.Gamma, hbar * st.omega * P) < 1e-8);
        // widths grow with n among populated states; above the slit P = 1 and Gamma = hbar omega
        if (i > 0 && st.populated) CHECK(st.Gamma > set.states[i - 1].Gamma);
    }
    // zero-width barrier
    const double E = 3.0 * s.E;
    CHECK(wkb_barrier_factor(mn, g, E, E / (mn * g)) == 1.0);
    // widths shrink monotonically as the slit opens
    double prev = 1.0;
    for (double h = 20e-6; h < 200e-6; h += 10e-6) {
        const double P = wkb_barrier_factor(mn, g, set.states[0].E, h);
        CHECK(P < prev);
        prev = P;
    }
    CHECK(prev < 1e-90);
}

TEST_CASE("property: WKB factor against quadrature") {
    oracle::Gen gen(41);
    for (int i = 0; i < 100; ++i) {
        const double a = gen.log_uniform(1, 1e6);
        const double m = gen.log_uniform(1e-30, 1e-26);
        const auto s = characteristic_scales(m, a);
        const double E = gen.uniform(1, 20) * s.E;
        const double dH = E / (m * a) + gen.uniform(0, 6) * s.l;
        const double P = wkb_barrier_factor(m, a, E, dH);
        CHECK(P == doctest::Approx(oracle::wkb_factor_quadrature(m, a, E, dH)).epsilon(1e-9));
        CHECK(P <= 1.0);
        CHECK(P > 0.0);
    }
}

TEST_CASE("state counting") {
    CHECK(count_states_below(mn, g, 40e-6) == 4);  // l = 5.87 um at standard gravity
    CHECK(count_states_below(mn, g, 1e-7) == 0);
}
