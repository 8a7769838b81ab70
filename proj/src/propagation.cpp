#include "wgsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

using constants::hbar;
using constants::pi;

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::vector<double> cell_widths(const std::vector<double>& a) {
    const std::size_t n = a.size();
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? a[0] - 0.5 * (a[1] - a[0]) : 0.5 * (a[i - 1] + a[i]);
        const double hi = i + 1 == n ? a[n - 1] + 0.5 * (a[n - 1] - a[n - 2]) : 0.5 * (a[i] + a[i + 1]);
        w[i] = hi - lo;
    }
    return w;
}

}  // namespace

cplx SpectralPacket::at(double kk) const {
    const cplx step = std::polar(1.0, -kk * h);
    cplx ph = 1.0, acc = 0.0;
    for (const auto& s : src) {
        acc += s * ph;
        ph *= step;
    }
    return acc * (h * inv_sqrt_2pi);
}

std::vector<cplx> SpectralPacket::on_grid(double k_first, double dk, std::size_t n) const {
    // psi~(k_first + i dk) = sum_j s_j e^{-i k_first x_j} (e^{-i dk x_j})^i
    std::vector<cplx> a(src.size()), r(src.size());
    for (std::size_t j = 0; j < src.size(); ++j) {
        const double x = h * double(j);
        a[j] = src[j] * std::polar(1.0, -k_first * x);
        r[j] = std::polar(1.0, -dk * x);
    }
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = 0.0;
        // re-seed every 64 steps so phasor error stays at rounding level
        if (i % 64 == 0 && i > 0) {
            const double kk = k_first + dk * double(i);
            for (std::size_t j = 0; j < src.size(); ++j)
                a[j] = src[j] * std::polar(1.0, -kk * h * double(j));
        }
        for (std::size_t j = 0; j < src.size(); ++j) {
            acc += a[j];
            a[j] *= r[j];
        }
        out[i] = acc * (h * inv_sqrt_2pi);
    }
    return out;
}

SpectralPacket to_spectrum(const WavePacket& p, double mass, int pad) {
    if (pad < 1) throw ValidationError("to_spectrum: pad must be >= 1");
    if (!(p.v > 0.0)) throw ValidationError("to_spectrum: packet velocity must be > 0");
    SpectralPacket s;
    s.h = p.grid.spacing();
    s.k0 = mass * p.v / hbar;
    std::size_t n = p.psi.size();
    while (n > 0 && p.psi[n - 1] == cplx(0.0, 0.0)) --n;
    if (n < 4) throw ValidationError("to_spectrum: packet has no support");
    s.src.assign(p.psi.begin(), p.psi.begin() + n);
    s.norm_x = norm(p);

    std::vector<double> x2(n);
    for (std::size_t i = 0; i < n; ++i) x2[i] = std::norm(s.src[i]) * p.grid.x(i) * p.grid.x(i);
    s.rms_height = std::sqrt(simpson(x2.data(), n, s.h) / s.norm_x);
    for (std::size_t i = 0; i < n; ++i) x2[i] = std::norm(s.src[i]) * p.grid.x(i);
    s.centroid = simpson(x2.data(), n, s.h) / s.norm_x;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = p.grid.x(i) - s.centroid;
        x2[i] = std::norm(s.src[i]) * u * u;
    }
    s.source_length = 2.0 * std::sqrt(simpson(x2.data(), n, s.h) / s.norm_x);

    const std::size_t M = static_cast<std::size_t>(pad) * n;
    const double dk = 2.0 * pi / (s.h * double(M));
    const double k_first = -pi / s.h;
    s.psik = s.on_grid(k_first, dk, M);
    s.k.resize(M);
    double nk = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < M; ++i) {
        s.k[i] = k_first + dk * double(i);
        const double w = std::norm(s.psik[i]) * dk;
        nk += w;
        m1 += w * s.k[i];
        m2 += w * s.k[i] * s.k[i];
    }
    // A packet that does not vanish at the wall (lossy wall) differs from the
    // band-limited sum by O(h |psi(0)|^2): the endpoint weight plus the 1/k^2 tail.
    // That is allowed while small; a hard edge such as a top-hat is not.
    const double edge = s.h * std::norm(s.src[0]);
    if (edge > 1e-4 * s.norm_x || std::abs(nk - s.norm_x) > 1e-8 * s.norm_x + edge) {
        std::ostringstream msg;
        msg << "to_spectrum: Parseval mismatch " << std::abs(nk - s.norm_x) / s.norm_x
            << " (packet not resolved by its grid; refine the height grid)";
        throw ValidationError(msg.str());
    }
    const double mean = m1 / nk, sigma = std::sqrt(std::max(m2 / nk - mean * mean, 0.0));
    s.spectral_length = 1.0 / sigma;
    if (std::abs(mean) + 6.0 * sigma > pi / s.h) {
        std::ostringstream msg;
        msg << "to_spectrum: k range " << pi / s.h << " 1/m covers less than 6 spectral widths ("
            << sigma << " 1/m); refine the height grid";
        throw ValidationError(msg.str());
    }
    return s;
}

std::vector<double> InterferencePattern::pos_weights() const { return cell_widths(pos.values); }
std::vector<double> InterferencePattern::vel_weights() const { return cell_widths(vel.values); }

double InterferencePattern::row_integral(std::size_t iv) const {
    const auto wx = pos_weights();
    double s = 0;
    for (std::size_t ix = 0; ix < nx(); ++ix) s += at(iv, ix) * wx[ix];
    return s;
}

double InterferencePattern::integral() const {
    const auto wv = vel_weights();
    double s = 0;
    for (std::size_t iv = 0; iv < nv(); ++iv) s += row_integral(iv) * wv[iv];
    return s;
}

InterferencePattern make_pattern(Axis pos, Axis vel, std::string value_unit) {
    InterferencePattern p;
    p.pos = std::move(pos);
    p.vel = std::move(vel);
    p.value_unit = std::move(value_unit);
    p.F.assign(p.nx() * p.nv(), 0.0);
    p.meta["convolved"] = "false";
    return p;
}

double far_field_ratio(const SpectralPacket& s, double D) {
    const double z0 = 2.0 * s.k0 * s.source_length * s.source_length;
    return D / z0;
}

std::vector<double> far_field_row(const SpectralPacket& s, const DetectorConfig& det, double v,
                                  double weight, bool include_fall, std::string* warning) {
    if (!(det.D > 0.0)) throw ValidationError("far_field: detector distance must be > 0");
    if (det.n_x < 2 || !(det.x_max > det.x_min))
        throw ValidationError("far_field: detector grid needs n_x >= 2 and x_max > x_min");
    const double ratio = far_field_ratio(s, det.D);
    if (ratio < 20.0 && !det.force_far_field) {
        std::ostringstream msg;
        msg << "far_field: z/z0 = " << ratio << " < 20, stationary phase not valid "
            << "(set force_far_field to override)";
        throw ValidationError(msg.str());
    }
    if (warning && ratio < 100.0)
        *warning = "z/z0 = " + fmt_g(ratio) + " below 100, far-field approximation marginal";
    const double z = det.D;
    const double shift = include_fall ? 0.5 * det.a_fall * (z / v) * (z / v) : 0.0;
    const double dx = (det.x_max - det.x_min) / double(det.n_x - 1);
    const double k_first = s.k0 * (det.x_min + shift - s.centroid) / z;
    const double dk = s.k0 * dx / z;
    const auto amp = s.on_grid(k_first, dk, det.n_x);
    std::vector<double> F(det.n_x);
    for (std::size_t i = 0; i < det.n_x; ++i) F[i] = weight * (s.k0 / z) * std::norm(amp[i]);
    return F;
}

namespace {
Axis detector_axis(const DetectorConfig& det) {
    Axis a{"x", "m", std::vector<double>(det.n_x)};
    const double dx = (det.x_max - det.x_min) / double(det.n_x - 1);
    for (std::size_t i = 0; i < det.n_x; ++i) a.values[i] = det.x_min + dx * double(i);
    return a;
}
}  // namespace

InterferencePattern far_field_flux(const SpectralPacket& s, const DetectorConfig& det, double v,
                                   double weight, bool include_fall) {
    auto p = make_pattern(detector_axis(det), Axis{"v", "m/s", {v}}, "1/m");
    std::string warn;
    p.F = far_field_row(s, det, v, weight, include_fall, &warn);
    p.meta["far_field_ratio"] = fmt_g(far_field_ratio(s, det.D));
    p.meta["fall_applied"] = include_fall ? "true" : "false";
    if (!warn.empty()) p.meta["warning"] = warn;
    return p;
}

InterferencePattern fall_shift(const InterferencePattern& p, const DetectorConfig& det) {
    InterferencePattern out = p;
    const auto& x = p.pos.values;
    const std::size_t n = x.size();
    if (n < 2) return out;
    const double dx = (x[n - 1] - x[0]) / double(n - 1);
    for (std::size_t iv = 0; iv < p.nv(); ++iv) {
        const double v = p.vel.values[iv];
        const double s = 0.5 * det.a_fall * (det.D / v) * (det.D / v);
        // F'(x_i) = F(x_i + s): fractional index shift
        const double f = s / dx;
        const double fl = std::floor(f);
        const auto m = static_cast<long long>(fl);
        const double th = f - fl;
        for (std::size_t i = 0; i < n; ++i) {
            const long long j = static_cast<long long>(i) + m;
            auto val = [&](long long k) {
                return (k >= 0 && k < static_cast<long long>(n)) ? p.at(iv, static_cast<std::size_t>(k)) : 0.0;
            };
            out.at(iv, i) = th == 0.0 ? val(j) : (1.0 - th) * val(j) + th * val(j + 1);
        }
    }
    out.meta["fall_applied"] = "true";
    out.meta["fall_a_m_s2"] = fmt_g(det.a_fall);
    return out;
}

InterferencePattern convolve_resolution(const InterferencePattern& p, const DetectorConfig& det) {
    const std::size_t nx = p.nx(), nv = p.nv();
    const auto wx = p.pos_weights();
    const auto wv = p.vel_weights();
    const auto& xs = p.pos.values;
    const auto& vs = p.vel.values;

    // position: cell-integrated Gaussian, normalized per source
    std::vector<double> tmp(p.F.size(), 0.0);
    const double sigma = 0.5 * det.res_x;
    std::vector<double> frac(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        if (sigma <= 0.0) {
            for (std::size_t iv = 0; iv < nv; ++iv) tmp[iv * nx + i] += p.F[iv * nx + i];
            continue;
        }
        double total = 0;
        for (std::size_t j = 0; j < nx; ++j) {
            const double lo = xs[j] - 0.5 * wx[j] - xs[i], hi = xs[j] + 0.5 * wx[j] - xs[i];
            frac[j] = 0.5 * (std::erf(hi / (std::sqrt(2.0) * sigma)) - std::erf(lo / (std::sqrt(2.0) * sigma)));
            total += frac[j];
        }
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const double mass = p.F[iv * nx + i] * wx[i];
            if (mass == 0.0) continue;
            for (std::size_t j = 0; j < nx; ++j)
                if (frac[j] > 0.0) tmp[iv * nx + j] += mass * frac[j] / (total * wx[j]);
        }
    }

    // velocity: boxcar of width v^2 dt / L (or res_v), overlap fractions per source
    std::vector<double> out(p.F.size(), 0.0);
    std::vector<double> vfrac(nv);
    for (std::size_t a = 0; a < nv; ++a) {
        double width = 0.0;
        if (det.res_t > 0.0) {
            if (!(det.tof_length > 0.0))
                throw ValidationError("convolve_resolution: res_t needs tof_length > 0");
            width = vs[a] * vs[a] * det.res_t / det.tof_length;
        } else {
            width = det.res_v;
        }
        std::fill(vfrac.begin(), vfrac.end(), 0.0);
        if (width <= 0.0 || nv == 1) {
            vfrac[a] = 1.0;
        } else {
            const double lo = vs[a] - 0.5 * width, hi = vs[a] + 0.5 * width;
            double total = 0;
            for (std::size_t b = 0; b < nv; ++b) {
                const double clo = vs[b] - 0.5 * wv[b], chi = vs[b] + 0.5 * wv[b];
                vfrac[b] = std::max(0.0, std::min(hi, chi) - std::max(lo, clo));
                total += vfrac[b];
            }
            for (auto& f : vfrac) f /= total;
        }
        for (std::size_t b = 0; b < nv; ++b) {
            if (vfrac[b] == 0.0) continue;
            const double scale = vfrac[b] * wv[a] / wv[b];
            for (std::size_t i = 0; i < nx; ++i) out[b * nx + i] += tmp[a * nx + i] * scale;
        }
    }
    InterferencePattern r = p;
    r.F = std::move(out);
    r.meta["convolved"] = "true";
    r.meta["resolution_x_m"] = fmt_g(det.res_x);
    r.meta["resolution_t_s"] = fmt_g(det.res_t);
    if (det.res_t <= 0.0) r.meta["resolution_v_m_s"] = fmt_g(det.res_v);
    return r;
}

std::vector<double> surface_current_row(const StateSet& set, const std::vector<cplx>& d, double t0,
                                        const std::vector<double>& z, double v, double lifetime,
                                        double weight) {
    if (d.size() != set.size()) throw ValidationError("surface_current: amplitude count mismatch");
    if (!(v > 0.0)) throw ValidationError("surface_current: v must be > 0");
    const double h = set.grid.spacing();
    std::vector<cplx> p0(set.size()), d0(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto& s = set.states[k].psi;
        p0[k] = s[0];
        d0[k] = (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
    }
    std::vector<double> F(z.size(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double t = z[i] / v;
        const double dt = t - t0;
        cplx psi = 0.0, dpsi = 0.0;
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (d[k] == cplx(0.0, 0.0)) continue;
            const auto& st = set.states[k];
            const cplx c = d[k] * std::exp(cplx(-st.Gamma * dt / (2.0 * hbar), -st.E * dt / hbar));
            psi += c * p0[k];
            dpsi += c * d0[k];
        }
        const double decay = std::isinf(lifetime) ? 1.0 : std::exp(-t / lifetime);
        F[i] = -decay * weight * (hbar / set.mass) * std::imag(std::conj(psi) * dpsi);
    }
    return F;
}

double fringe_contrast(const InterferencePattern& p) {
    double num = 0, den = 0;
    const auto wv = p.vel_weights();
    for (std::size_t iv = 0; iv < p.nv(); ++iv) {
        const std::size_t n = p.nx();
        double peak = 0;
        for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, p.at(iv, i));
        if (peak <= 0) continue;
        std::vector<std::size_t> maxima;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double f = p.at(iv, i);
            if (f >= 0.05 * peak && f > p.at(iv, i - 1) && f >= p.at(iv, i + 1)) maxima.push_back(i);
        }
        double vis = 0;
        int pairs = 0;
        for (std::size_t m = 1; m < maxima.size(); ++m) {
            double lo = peak;
            for (std::size_t i = maxima[m - 1]; i <= maxima[m]; ++i) lo = std::min(lo, p.at(iv, i));
            const double hi = std::min(p.at(iv, maxima[m - 1]), p.at(iv, maxima[m]));
            vis += (hi - lo) / (hi + lo);
            ++pairs;
        }
        const double w = p.row_integral(iv) * wv[iv];
        num += w * (pairs ? vis / pairs : 0.0);
        den += w;
    }
    return den > 0 ? num / den : 0.0;
}

void write_pattern_csv(std::ostream& os, const InterferencePattern& p) {
    os << "# format: wgsim-pattern-1\n";
    os << "# axis_pos: " << p.pos.name << " [" << p.pos.unit << "]\n";
    os << "# axis_vel: " << p.vel.name << " [" << p.vel.unit << "]\n";
    os << "# value: F [" << p.value_unit << "]\n";
    for (const auto& [k, v] : p.meta) os << "# " << k << ": " << v << "\n";
    os << p.pos.name << "," << p.vel.name << ",F\n";
    char buf[96];
    for (std::size_t iv = 0; iv < p.nv(); ++iv)
        for (std::size_t ix = 0; ix < p.nx(); ++ix) {
            std::snprintf(buf, sizeof buf, "%.10e,%.10e,%.10e\n", p.pos.values[ix], p.vel.values[iv],
                          p.at(iv, ix));
            os << buf;
        }
}

InterferencePattern read_pattern_csv(std::istream& is) {
    InterferencePattern p;
    std::string line;
    int lineno = 0;
    bool header = false;
    std::vector<double> xs, vs, fs;
    auto parse_axis = [](const std::string& s, Axis& a) {
        const auto lb = s.find(" ["), rb = s.rfind(']');
        if (lb == std::string::npos || rb == std::string::npos) return false;
        a.name = s.substr(0, lb);
        a.unit = s.substr(lb + 2, rb - lb - 2);
        return true;
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = "pattern csv line " + std::to_string(lineno) + ": ";
        if (line[0] == '#') {
            const auto colon = line.find(": ");
            if (colon == std::string::npos || line.size() < 3) throw ValidationError(where + "bad metadata line");
            const std::string key = line.substr(2, colon - 2), val = line.substr(colon + 2);
            if (key == "format") {
                if (val != "wgsim-pattern-1") throw ValidationError(where + "unknown format " + val);
            } else if (key == "axis_pos") {
                if (!parse_axis(val, p.pos)) throw ValidationError(where + "bad axis");
            } else if (key == "axis_vel") {
                if (!parse_axis(val, p.vel)) throw ValidationError(where + "bad axis");
            } else if (key == "value") {
                Axis tmp;
                if (!parse_axis(val, tmp)) throw ValidationError(where + "bad value unit");
                p.value_unit = tmp.unit;
            } else {
                p.meta[key] = val;
            }
            continue;
        }
        if (!header) {
            header = true;
            continue;
        }
        double x, v, f;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &v, &f) != 3) throw ValidationError(where + "bad row");
        xs.push_back(x);
        vs.push_back(v);
        fs.push_back(f);
    }
    if (p.pos.name.empty() || p.vel.name.empty()) throw ValidationError("pattern csv: missing axis metadata");
    // rows are velocity-major: the position axis repeats for every velocity
    std::size_t nx = 0;
    while (nx < vs.size() && vs[nx] == vs[0]) ++nx;
    if (nx == 0 || fs.size() % nx) throw ValidationError("pattern csv: ragged rows");
    p.pos.values.assign(xs.begin(), xs.begin() + nx);
    for (std::size_t i = 0; i < vs.size(); i += nx) p.vel.values.push_back(vs[i]);
    p.F = fs;
    return p;
}

}  // namespace wgsim
