#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/qr_model.hpp"

using namespace wgsim;
using constants::eV;
using constants::hbar;

namespace {
const double mH = 1.6735328380e-27;

// |r|^2 of the Cayley-form threshold amplitude r = -(1 - i k a)/(1 + i k a).
double cayley_P(double k, std::complex<double> a) {
    const std::complex<double> ika(0.0, k);
    return std::norm((1.0 - ika * a) / (1.0 + ika * a));
}
}  // namespace

TEST_CASE("threshold limit") {
    CHECK(reflection_probability(QRModel::scattering_length({1e-9, -2e-8}), 0.0, mH) == 1.0);
    CHECK(reflection_probability(QRModel::hard_wall(1e-7 * eV), 0.0, mH) == 1.0);
    const auto tab = QRModel::load_table(WGSIM_DATA_DIR "/qr/silica_H.tab");
    CHECK(reflection_probability(tab, 0.0, mH) == 1.0);
}

TEST_CASE("hard wall step") {
    const auto m = QRModel::hard_wall(1e-7 * eV);
    CHECK(reflection_probability(m, 5e-8 * eV, mH) == 1.0);
    CHECK(reflection_probability(m, 2e-7 * eV, mH) == 0.0);
    CHECK(effective_critical_energy(m, 3.0, mH) == 1e-7 * eV);
}

TEST_CASE("small-k expansion against the exact threshold amplitude") {
    const std::complex<double> a(3e-9, -2.2910e-8);
    const double b = -a.imag();
    for (double ka : {1e-6, 1e-5, 1e-4, 5e-4, 9e-4}) {
        const double k = ka / std::abs(a);
        const double E = hbar * hbar * k * k / (2 * mH);
        const double P = reflection_probability(QRModel::scattering_length(a), E, mH);
        const double first_order = 1.0 - 4.0 * k * b;
        const double bound = 10.0 * ka * ka;
        CHECK(std::abs(cayley_P(k, a) - first_order) < bound);
        CHECK(std::abs(P - first_order) < bound);
    }
}

TEST_CASE("scattering length sign convention is enforced") {
    CHECK_THROWS_AS(QRModel::scattering_length({0, 1e-9}), ValidationError);
    CHECK_NOTHROW(QRModel::scattering_length({0, -1e-9}));
}

TEST_CASE("closed-form E_lim for P = exp(-E/E0)") {
    const double E0 = 1e-10 * eV;
    std::vector<QRTablePoint> t;
    // ln P is linear in E, not in sqrt(E); a dense table keeps interpolation error small
    for (int i = 1; i <= 4000; ++i) {
        const double E = E0 * 5.0 * i / 4000.0;
        t.push_back({E, std::exp(-E / E0)});
    }
    const auto m = QRModel::tabulated(t);
    const double E = effective_critical_energy(m, 1.0, mH);
    CHECK(E / (E0 * std::log(2.0)) == doctest::Approx(1.0).epsilon(2e-6));
}

TEST_CASE("scattering-length E_lim closed form") {
    const double b = 2.0e-8;
    const auto m = QRModel::scattering_length({0, -b});
    for (double beta : {1.0, 2.5, 10.0}) {
        const double k = std::log(2.0) / (4 * b * beta);
        const double expect = hbar * hbar * k * k / (2 * mH);
        CHECK(effective_critical_energy(m, beta, mH) / expect == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("shipped tables give the design E_lim values") {
    const auto H = QRModel::load_table(WGSIM_DATA_DIR "/qr/silica_H.tab");
    CHECK(effective_critical_energy(H, 10.0, mH) / eV == doctest::Approx(1.2e-11).epsilon(0.02));
    const auto Hb = QRModel::load_table(WGSIM_DATA_DIR "/qr/silica_Hbar.tab");
    CHECK(effective_critical_energy(Hb, 5.0, mH) / eV == doctest::Approx(2.0e-10).epsilon(0.02));
}

TEST_CASE("table lookup interpolates linearly in (sqrt E, ln P)") {
    const auto m = QRModel::tabulated({{1.0e-12, 0.9}, {4.0e-12, 0.5}});
    // midpoint in sqrt(E): sqrt(E) = 1.5e-6
    const double E = 2.25e-12;
    CHECK(reflection_probability(m, E, mH) == doctest::Approx(std::sqrt(0.9 * 0.5)).epsilon(1e-14));
    // implied (0, 1) row
    CHECK(reflection_probability(m, 0.25e-12, mH) == doctest::Approx(std::sqrt(0.9)).epsilon(1e-14));
    CHECK_THROWS_AS(reflection_probability(m, 5e-12, mH), ValidationError);
    CHECK(reflection_probability(m, 5e-12, mH, true) == 0.5);
}

TEST_CASE("table parser reports line numbers") {
    auto expect_line = [](const std::string& text, const std::string& needle) {
        try {
            QRModel::parse_table(text, "t.tab");
            FAIL("expected parse failure");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_line("# c\n1e-12 0.9\n1e-13 0.8\n", "t.tab:3:");
    expect_line("1e-12 0.9\n2e-12 1.5\n", "t.tab:2:");
    expect_line("1e-12 0.9\n2e-12\n", "t.tab:2:");
    expect_line("# only comments\n", "no data");
    CHECK_THROWS_AS(QRModel::load_table("/nonexistent/x.tab"), IoError);
}

TEST_CASE("unbracketed table raises a numerical error with endpoint survival") {
    const auto m = QRModel::tabulated({{1e-20, 0.999}, {1e-19, 0.998}});
    try {
        effective_critical_energy(m, 2.0, mH);
        FAIL("expected throw");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("survival") != std::string::npos);
    }
}

TEST_CASE("property: P in [0, 1] and monotone for scattering lengths") {
    oracle::Gen gen(21);
    for (int i = 0; i < 300; ++i) {
        const std::complex<double> a(gen.uniform(-5e-8, 5e-8), -gen.log_uniform(1e-11, 1e-7));
        const auto m = QRModel::scattering_length(a);
        double prev = 1.0;
        double E = gen.log_uniform(1e-30, 1e-25);
        for (int j = 0; j < 20; ++j) {
            const double P = reflection_probability(m, E, mH);
            CHECK(P >= 0.0);
            CHECK(P <= 1.0);
            CHECK(P <= prev);
            prev = P;
            E *= gen.uniform(1.0, 3.0);
        }
    }
}

TEST_CASE("property: E_lim decreases with beta") {
    const auto H = QRModel::load_table(WGSIM_DATA_DIR "/qr/silica_H.tab");
    oracle::Gen gen(22);
    for (int i = 0; i < 40; ++i) {
        const double b1 = gen.uniform(1.0, 30.0), b2 = b1 * gen.uniform(1.05, 3.0);
        CHECK(effective_critical_energy(H, b2, mH) < effective_critical_energy(H, b1, mH));
    }
}

TEST_CASE("property: survival two ways") {
    const auto H = QRModel::load_table(WGSIM_DATA_DIR "/qr/silica_H.tab");
    oracle::Gen gen(23);
    for (int i = 0; i < 300; ++i) {
        const double E = gen.log_uniform(1e-15, 1e-9) * eV;
        const double beta = gen.uniform(1.0, 50.0);
        const double P = reflection_probability(H, E, mH, true);
        const double s = survival(H, E, mH, beta, true);
        CHECK(std::abs(s - std::exp(beta * std::log(P))) <= 1e-12 * std::max(s, 1e-300) + 1e-300);
    }
}
