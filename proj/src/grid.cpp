#include "wgsim/grid.hpp"

#include <cmath>

#include "wgsim/errors.hpp"

namespace wgsim {

HeightGrid::HeightGrid(double x_max, std::size_t n_points) : x_max_(x_max), n_(n_points) {
    if (!(x_max > 0.0)) throw ValidationError("HeightGrid: x_max must be > 0");
    if (n_points < 3) throw ValidationError("HeightGrid: need at least 3 points");
    h_ = x_max / double(n_points - 1);
}

HeightGrid HeightGrid::with_node(double node, double h_max, double x_max) {
    if (!(node > 0.0 && h_max > 0.0 && x_max >= node))
        throw ValidationError("HeightGrid::with_node: need 0 < node <= x_max and h_max > 0");
    std::size_t m = static_cast<std::size_t>(std::ceil(node / h_max));
    if (m % 2) ++m;
    if (m < 2) m = 2;
    const double h = node / double(m);
    std::size_t total = static_cast<std::size_t>(std::ceil(x_max / h - 1e-9));
    if (total < m) total = m;
    if (total % 2) ++total;
    return HeightGrid(h * double(total), total + 1);
}

std::size_t HeightGrid::node_index(double pos) const {
    const double r = pos / h_;
    const double k = std::round(r);
    if (k < 0 || k >= double(n_) || std::abs(r - k) > 1e-9) return npos;
    return static_cast<std::size_t>(k);
}

template <class T>
static T simpson_impl(const T* f, std::size_t n, double h) {
    if (n < 2) return T(0);
    if (n == 2) return T(0.5 * h) * (f[0] + f[1]);
    std::size_t intervals = n - 1;
    T sum = T(0);
    std::size_t end = n - 1;  // last index covered by the Simpson part
    if (intervals % 2) {
        // 3/8 rule on the final three intervals
        end = n - 4;
        sum += T(3.0 * h / 8.0) * (f[end] + T(3) * f[end + 1] + T(3) * f[end + 2] + f[end + 3]);
    }
    if (end >= 2) {
        T s = f[0] + f[end];
        for (std::size_t i = 1; i < end; ++i) s += (i % 2 ? T(4) : T(2)) * f[i];
        sum += T(h / 3.0) * s;
    }
    return sum;
}

double simpson(const double* f, std::size_t n, double h) { return simpson_impl(f, n, h); }
cplx simpson(const cplx* f, std::size_t n, double h) { return simpson_impl(f, n, h); }

}  // namespace wgsim
