#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/sensitivity.hpp"

using namespace wgsim;

namespace {

// Gaussian location family on a fixed window: mean c a, width sigma, nv identical rows.
PatternGenerator location_family(double c, double sigma, std::size_t nv = 1) {
    return [=](double a) {
        Axis x{"x", "m", std::vector<double>(4001)};
        for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] = -0.02 + 1e-5 * double(i);
        Axis v{"v", "m/s", std::vector<double>(nv)};
        for (std::size_t j = 0; j < nv; ++j) v.values[j] = 10.0 + double(j);
        auto p = make_pattern(x, v, "1/m");
        for (std::size_t j = 0; j < nv; ++j)
            for (std::size_t i = 0; i < x.values.size(); ++i) {
                const double u = (x.values[i] - c * a) / sigma;
                p.at(j, i) = std::exp(-0.5 * u * u);
            }
        return normalize_density(p);
    };
}

}  // namespace

TEST_CASE("Gaussian location family: I = c^2 / sigma^2") {
    const double c = 2e-3, sigma = 1.5e-3;
    for (std::size_t nv : {1u, 5u}) {
        const auto f = fisher_information({location_family(c, sigma, nv), 0.7, 1e4, 0.01, ""});
        CHECK(f.I == doctest::Approx(c * c / (sigma * sigma)).epsilon(1e-5));
        CHECK(f.excluded_mass < 1e-12);
        // Cramer-Rao on the mean c a reproduces sigma / sqrt(N)
        CHECK(c * cramer_rao(f.I, 1e4) == doctest::Approx(sigma / 100).epsilon(1e-5));
    }
}

TEST_CASE("a-independent density carries no information") {
    const auto gen = location_family(0.0, 1e-3);
    const auto f = fisher_information({gen, 1.0, 10, 0.1, ""});
    CHECK(f.I == 0.0);
    CHECK(f.rel_change == 0.0);
}

TEST_CASE("Cramer-Rao bound") {
    CHECK(cramer_rao(1.0, 100) == doctest::Approx(0.1));
    CHECK(cramer_rao(3.0, 400) == doctest::Approx(cramer_rao(3.0, 100) / 2));
    CHECK_THROWS_AS(cramer_rao(1.0, 0.5), ValidationError);
}

TEST_CASE("property: reparameterization a -> k a scales I by 1/k^2") {
    oracle::Gen gen(71);
    for (int trial = 0; trial < 8; ++trial) {
        const double c = gen.log_uniform(1e-4, 1e-2), sigma = gen.log_uniform(5e-4, 3e-3);
        const double k = gen.log_uniform(0.1, 10);
        const double a0 = gen.uniform(-1, 1);
        const double da = 0.02 * sigma / c;
        const auto base = location_family(c, sigma);
        const PatternGenerator scaled = [&](double b) { return base(b / k); };
        const auto f1 = fisher_information({base, a0, 1, da, ""});
        const auto f2 = fisher_information({scaled, k * a0, 1, k * da, ""});
        CHECK(f2.I == doctest::Approx(f1.I / (k * k)).epsilon(1e-6));
    }
}

TEST_CASE("halving the step barely moves I") {
    const auto gen = location_family(1e-3, 8e-4);
    const auto f1 = fisher_information({gen, 0.0, 1, 0.04, ""});
    const auto f2 = fisher_information({gen, 0.0, 1, 0.02, ""});
    CHECK(std::abs(f2.I / f1.I - 1) < 0.01);
}

TEST_CASE("validation: normalization, step window, grids") {
    const auto good = location_family(1e-3, 1e-3);
    const PatternGenerator unnormalized = [&](double a) {
        auto p = good(a);
        for (auto& f : p.F) f *= 1.01;
        return p;
    };
    CHECK_THROWS_AS(fisher_information({unnormalized, 0.0, 1, 0.05, ""}), ValidationError);
    try {
        fisher_information({good, 0.0, 1, 1e-7, ""});
        FAIL("tiny step accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("try da =") != std::string::npos);
    }
    CHECK_THROWS_AS(fisher_information({good, 0.0, 1, 5.0, ""}), ValidationError);
    const PatternGenerator moving = [&](double a) {
        auto p = good(a);
        if (a > 0) p.pos.values[0] -= 1e-6;
        return p;
    };
    CHECK_THROWS_AS(fisher_information({moving, 0.0, 1, 0.05, ""}), ValidationError);
}

TEST_CASE("shift experiment") {
    const double c = 1e-3, sigma = 1e-3;
    const auto gen = location_family(c, sigma);
    const auto none = shift_experiment(gen, 0.0, 0.0, 1e4, 0.05);
    for (double d : none.difference.F) CHECK(d == 0.0);
    CHECK(none.relative_sigma == 0.0);
    const auto r = shift_experiment(gen, 0.0, 0.5, 1e4, 0.05);
    CHECK(r.sigma_a == doctest::Approx(sigma / c / 100).epsilon(1e-4));
    CHECK(r.relative_sigma == doctest::Approx(r.sigma_a / 0.5));
    double pos = 0, neg = 0;
    for (double d : r.difference.F) (d > 0 ? pos : neg) += d;
    CHECK(pos == doctest::Approx(-neg).epsilon(1e-9));
    CHECK(r.fisher.meta.at("caveat").find("lower bound") != std::string::npos);
    CHECK(charge_acceleration(2.0, 3.0, 4.0) == 1.5);
}
