#include "wgsim/airy.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

namespace {

using quad = __float128;

constexpr double kSeriesLimit = 9.0;
// Ai(0) = 1/(3^{2/3} Gamma(2/3)), -Ai'(0) = 1/(3^{1/3} Gamma(1/3)), sqrt(3), each
// as a double-double pair so the quad-precision series keeps its cancellation margin.
const quad kC1 = quad(0.3550280538878172) + quad(2.05233632436212e-17);
const quad kC2 = quad(0.2588194037928068) + quad(-2.522243111610832e-17);
const quad kSqrt3 = quad(1.7320508075688772) + quad(1.0035084221806903e-16);

// f(x) = sum 3^k (1/3)_k x^{3k}/(3k)!, g(x) = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
// Ai = c1 f - c2 g, Bi = sqrt3 (c1 f + c2 g), and the derivatives term by term.
AiryValues series(double xd) {
    const quad x = xd, x3 = x * x * x;
    quad f = 1, fp = 0, g = x, gp = 1;
    quad tf = 1, tg = x;  // current terms of f and g
    for (int k = 1; k < 400; ++k) {
        // tf_k = tf_{k-1} x^3 / ((3k-1)(3k)), tg_k = tg_{k-1} x^3 / ((3k)(3k+1))
        tf = tf * x3 / quad((3 * k - 1) * (3 * k));
        tg = tg * x3 / quad((3 * k) * (3 * k + 1));
        f += tf;
        g += tg;
        // d/dx x^{3k} = 3k x^{3k-1}; d/dx x^{3k+1} = (3k+1) x^{3k}
        fp += (x != 0) ? tf * quad(3 * k) / x : quad(0);
        gp += (x != 0) ? tg * quad(3 * k + 1) / x : quad(0);
        const double mag = std::abs(double(tf)) + std::abs(double(tg));
        if (k > 3 && mag < 1e-34 * (std::abs(double(f)) + std::abs(double(g)) + 1e-300)) break;
    }
    const quad c1 = kC1, c2 = kC2, s3 = kSqrt3;
    AiryValues v;
    v.ai = double(c1 * f - c2 * g);
    v.aip = double(c1 * fp - c2 * gp);
    v.bi = double(s3 * (c1 * f + c2 * g));
    v.bip = double(s3 * (c1 * fp + c2 * gp));
    return v;
}

// u_k and v_k of the standard asymptotic expansions.
struct AsymCoeffs {
    double u[60], v[60];
    AsymCoeffs() {
        u[0] = 1.0;
        v[0] = 1.0;
        for (int k = 1; k < 60; ++k) {
            u[k] = u[k - 1] * double((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
                   (216.0 * k * (2 * k - 1));
            v[k] = -u[k] * double(6 * k + 1) / double(6 * k - 1);
        }
    }
};
const AsymCoeffs& coeffs() {
    static const AsymCoeffs c;
    return c;
}

// Sums sum_k s^k c_k z^{-k} truncated at the smallest term.
double asym_sum(const double* c, double z, int sign, int parity_start, int step) {
    double sum = 0, prev = 1e300;
    for (int k = parity_start; k < 60; k += step) {
        const double t = c[k] * std::pow(z, -k);
        if (std::abs(t) > prev) break;
        prev = std::abs(t);
        const int idx = (k - parity_start) / step;
        sum += ((sign < 0 && (idx & 1)) ? -t : t);
        if (std::abs(t) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Scaled asymptotics for x > kSeriesLimit.
AiryValues positive_asymptotic_scaled(double x) {
    const auto& c = coeffs();
    const double z = 2.0 / 3.0 * x * std::sqrt(x);
    const double q = std::pow(x, 0.25);
    const double sp = std::sqrt(constants::pi);
    AiryValues v;
    v.ai = asym_sum(c.u, z, -1, 0, 1) / (2 * sp * q);
    v.aip = -q * asym_sum(c.v, z, -1, 0, 1) / (2 * sp);
    v.bi = asym_sum(c.u, z, +1, 0, 1) / (sp * q);
    v.bip = q * asym_sum(c.v, z, +1, 0, 1) / sp;
    return v;
}

AiryValues negative_asymptotic(double x) {
    const auto& c = coeffs();
    const double y = -x;
    const double z = 2.0 / 3.0 * y * std::sqrt(y);
    const double q = std::pow(y, 0.25);
    const double sp = std::sqrt(constants::pi);
    const double th = z - constants::pi / 4;
    const double cs = std::cos(th), sn = std::sin(th);
    // even/odd alternating sums
    const double ue = asym_sum(c.u, z, -1, 0, 2), uo = asym_sum(c.u, z, -1, 1, 2);
    const double ve = asym_sum(c.v, z, -1, 0, 2), vo = asym_sum(c.v, z, -1, 1, 2);
    AiryValues v;
    v.ai = (cs * ue + sn * uo) / (sp * q);
    v.aip = q * (sn * ve - cs * vo) / sp;
    v.bi = (-sn * ue + cs * uo) / (sp * q);
    v.bip = q * (cs * ve + sn * vo) / sp;
    return v;
}

}  // namespace

AiryValues airy_scaled(double x) {
    if (std::isnan(x)) throw ValidationError("airy: NaN argument");
    if (x > kSeriesLimit) return positive_asymptotic_scaled(x);
    if (x < -kSeriesLimit) return negative_asymptotic(x);
    AiryValues v = series(x);
    if (x > 0) {
        const double e = std::exp(2.0 / 3.0 * x * std::sqrt(x));
        v.ai *= e;
        v.aip *= e;
        v.bi /= e;
        v.bip /= e;
    }
    return v;
}

AiryValues airy(double x) {
    if (std::isnan(x)) throw ValidationError("airy: NaN argument");
    if (x < -kSeriesLimit) return negative_asymptotic(x);
    if (x <= kSeriesLimit) return series(x);
    AiryValues v = positive_asymptotic_scaled(x);
    const double z = 2.0 / 3.0 * x * std::sqrt(x);
    const double em = std::exp(-z), ep = std::exp(z);
    v.ai *= em;
    v.aip *= em;
    v.bi *= ep;
    v.bip *= ep;
    return v;
}

std::vector<double> airy_ai_zeros(int n) {
    if (n < 1) throw ValidationError("airy_ai_zeros: n must be >= 1");
    std::vector<double> out;
    out.reserve(n);
    auto f = [](double lam) { return airy(-lam).ai; };
    for (int k = 1; k <= n; ++k) {
        // Leading-order estimate t^{2/3}, t = 3 pi (4k-1)/8, is within a fraction of
        // the local spacing pi/sqrt(lambda).
        const double t = 3.0 * constants::pi * (4.0 * k - 1.0) / 8.0;
        const double est = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
        const double half = 0.3 * constants::pi / std::sqrt(est);
        double lo = est - half, hi = est + half;
        if (f(lo) * f(hi) > 0) throw NumericalError("airy_ai_zeros: bracket failed at n=" + std::to_string(k));
        boost::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(
            f, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
        out.push_back(0.5 * (r.first + r.second));
    }
    return out;
}

}  // namespace wgsim
