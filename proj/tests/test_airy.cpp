#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "wgsim/airy.hpp"

using namespace wgsim;
namespace bm = boost::math;

namespace {
// Local scale of Ai: |Ai| envelope for x < 0, the function itself for x >= 0.
double ai_env(double x) {
    if (x >= 0) return std::abs(bm::airy_ai(x));
    return 1.0 / (std::sqrt(M_PI) * std::pow(-x, 0.25));
}
double aip_env(double x) {
    if (x >= 0) return std::abs(bm::airy_ai_prime(x));
    return std::pow(-x, 0.25) / std::sqrt(M_PI);
}
}  // namespace

TEST_CASE("Ai and Ai' against the Boost reference on [-60, 12]") {
    double worst = 0, worst_p = 0;
    for (double x = -60.0; x <= 12.0; x += 0.0137) {
        const auto v = airy(x);
        worst = std::max(worst, std::abs(v.ai - bm::airy_ai(x)) / ai_env(x));
        worst_p = std::max(worst_p, std::abs(v.aip - bm::airy_ai_prime(x)) / aip_env(x));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_p < 1e-10);
}

TEST_CASE("Bi and Bi' against the Boost reference on [-60, 30]") {
    double worst = 0;
    for (double x = -60.0; x <= 30.0; x += 0.0173) {
        const auto v = airy(x);
        const double env = x < 0 ? 1.0 / (std::sqrt(M_PI) * std::pow(-x, 0.25)) : bm::airy_bi(x);
        const double envp = x < 0 ? std::pow(-x, 0.25) / std::sqrt(M_PI) : bm::airy_bi_prime(x);
        worst = std::max(worst, std::abs(v.bi - bm::airy_bi(x)) / env);
        worst = std::max(worst, std::abs(v.bip - bm::airy_bi_prime(x)) / envp);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("scaled values stay finite far out") {
    for (double x : {1.0, 9.5, 50.0, 400.0, 5000.0}) {
        const auto s = airy_scaled(x);
        const double z = 2.0 / 3.0 * x * std::sqrt(x);
        CHECK(std::isfinite(s.ai));
        CHECK(std::isfinite(s.bi));
        // Ai Bi ~ 1/(2 pi sqrt(x)) asymptotically; exact Wronskian Ai Bi' - Ai' Bi = 1/pi
        CHECK(s.ai * s.bip - s.aip * s.bi == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
        if (x < 100) CHECK(s.ai * std::exp(-z) == doctest::Approx(bm::airy_ai(x)).epsilon(1e-10));
    }
}

TEST_CASE("Wronskian identity across the series/asymptotic seam") {
    for (double x = -20; x <= 9.5; x += 0.05) {
        const auto v = airy(x);
        const double w = v.ai * v.bip - v.aip * v.bi;
        const double scale = x > 0 ? std::abs(v.ai * v.bip) : 1.0;
        CHECK(std::abs(w - 1.0 / M_PI) < 1e-11 * std::max(1.0, scale / (1.0 / M_PI)));
    }
}

TEST_CASE("first zero bracket by sign change") {
    CHECK(airy_ai(-2.3) > 0.0);
    CHECK(airy_ai(-2.4) < 0.0);
}

TEST_CASE("zeros against the Boost reference") {
    const auto z = airy_ai_zeros(300);
    for (int n = 1; n <= 300; ++n) {
        const double ref = -bm::airy_ai_zero<double>(n);
        CHECK(std::abs(z[n - 1] - ref) < 1e-12 * ref);
    }
    CHECK(z[0] == doctest::Approx(2.338107410459767).epsilon(1e-14));
}
