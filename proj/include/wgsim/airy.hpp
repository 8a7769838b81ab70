#pragma once

#include <vector>

namespace wgsim {

struct AiryValues {
    double ai, aip, bi, bip;
};

// Ai, Ai', Bi, Bi' for real x. Maclaurin series (evaluated in quad precision) for
// |x| <= 9, asymptotic expansions beyond. Relative accuracy ~1e-10 or better away
// from zeros; absolute accuracy relative to the local envelope near zeros.
AiryValues airy(double x);

// Exponentially scaled values: for x > 0 returns Ai e^{z}, Ai' e^{z}, Bi e^{-z},
// Bi' e^{-z} with z = (2/3) x^{3/2}; identical to airy(x) for x <= 0.
AiryValues airy_scaled(double x);

inline double airy_ai(double x) { return airy(x).ai; }

// The first n zeros of Ai(-lambda), i.e. lambda_1 < lambda_2 < ... (positive).
std::vector<double> airy_ai_zeros(int n);

}  // namespace wgsim
