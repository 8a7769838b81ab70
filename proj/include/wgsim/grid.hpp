#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wgsim {

using cplx = std::complex<double>;

// Uniform grid x_i = i * spacing on [0, x_max].
class HeightGrid {
public:
    HeightGrid() = default;
    HeightGrid(double x_max, std::size_t n_points);

    // Grid whose spacing is at most h_max, that places `node` exactly on an even
    // index (so composite Simpson panels never straddle it) and reaches x_max.
    static HeightGrid with_node(double node, double h_max, double x_max);

    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double spacing() const { return h_; }
    double x(std::size_t i) const { return double(i) * h_; }
    // Index of a grid node within 1e-9 spacings of `pos`, or npos.
    std::size_t node_index(double pos) const;

    bool operator==(const HeightGrid& o) const { return n_ == o.n_ && x_max_ == o.x_max_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    double x_max_ = 0.0;
    std::size_t n_ = 0;
    double h_ = 0.0;
};

// Composite Simpson on samples f[0..n) with spacing h; an odd number of intervals
// closes with the 3/8 rule. n = 2 falls back to the trapezoid rule.
double simpson(const double* f, std::size_t n, double h);
cplx simpson(const cplx* f, std::size_t n, double h);

}  // namespace wgsim
