#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wgsim/packet.hpp"

namespace wgsim {

// Fourier transform psi~(k) = (2 pi)^(-1/2) integral psi(x) exp(-i k x) dx of a packet
// sampled on a uniform grid. The samples are kept so psi~ can be evaluated exactly
// (as a discrete-time Fourier transform) at any k, not only on the stored grid.
struct SpectralPacket {
    std::vector<double> k;     // uniform over [-pi/h, pi/h), 1/m
    std::vector<cplx> psik;    // psi~ on k
    double k0 = 0.0;           // m v / hbar
    double h = 0.0;            // source spacing, m
    std::vector<cplx> src;     // source samples psi(j h), trailing zeros trimmed
    double norm_x = 0.0;       // integral |psi|^2 dx
    double rms_height = 0.0;   // sqrt(<x^2>) about the mirror plane, m
    double centroid = 0.0;     // <x>, the expansion point of the far-field map, m
    double spectral_length = 0.0;  // 1/sigma_k
    double source_length = 0.0;    // l0 = 2 sigma_x about the centroid; 1/sigma_k for a Gaussian

    cplx at(double kk) const;
    // Evaluates psi~ on n points k_first + i dk with a phasor recurrence.
    std::vector<cplx> on_grid(double k_first, double dk, std::size_t n) const;
};

// pad >= 1 controls the number of k samples (pad times the support length). Throws
// ValidationError when Parseval fails to 1e-8 (packet not resolved by its grid; a
// small h |psi(0)|^2 edge term is allowed for lossy walls) or the Nyquist band does
// not reach 6 spectral widths past the mean.
SpectralPacket to_spectrum(const WavePacket& p, double mass, int pad = 2);

struct DetectorConfig {
    double D = 1.0;            // mirror exit to detector, m
    double a_fall = 0.0;       // signed acceleration toward -x in flight, m/s^2
    double res_x = 0.0;        // stated position resolution (= 2 sigma), m
    double res_t = 0.0;        // chopper opening time (boxcar), s
    double tof_length = 0.0;   // chopper to detector flight path for res_t, m
    double res_v = 0.0;        // direct boxcar width in v, used when res_t = 0, m/s
    double x_min = -1e-3, x_max = 1e-3;
    std::size_t n_x = 401;
    bool force_far_field = false;
};

struct Axis {
    std::string name;  // "x", "z" or "v"
    std::string unit;  // "m" or "m/s"
    std::vector<double> values;
};

// F over (position, velocity); values are row-major with one row per velocity.
struct InterferencePattern {
    Axis pos;
    Axis vel;
    std::string value_unit;
    std::vector<double> F;
    std::map<std::string, std::string> meta;

    std::size_t nx() const { return pos.values.size(); }
    std::size_t nv() const { return vel.values.size(); }
    double& at(std::size_t iv, std::size_t ix) { return F[iv * nx() + ix]; }
    double at(std::size_t iv, std::size_t ix) const { return F[iv * nx() + ix]; }

    // Cell widths of each axis (midpoint rule; 1 for a single-valued axis).
    std::vector<double> pos_weights() const;
    std::vector<double> vel_weights() const;
    // sum F dx dv over the whole pattern
    double integral() const;
    // sum F dx over one row
    double row_integral(std::size_t iv) const;
};

InterferencePattern make_pattern(Axis pos, Axis vel, std::string value_unit);

// D / z0 with z0 = 2 k0 l0^2 and l0 = source_length.
double far_field_ratio(const SpectralPacket& s, double D);

// One row of F(x) = w (k0/z) |psi~(k0 (x + s_fall - <x>)/z)|^2 on the detector grid,
// with s_fall = a_fall (D/v)^2 / 2 when include_fall is set. Expanding the Fresnel
// phase about the centroid <x> rather than the mirror plane removes the source
// offset from the neglected quadratic term. Requires D/z0 >= 20 unless
// det.force_far_field; warnings go to *warning.
std::vector<double> far_field_row(const SpectralPacket& s, const DetectorConfig& det, double v,
                                  double weight = 1.0, bool include_fall = true,
                                  std::string* warning = nullptr);

// Single-velocity pattern wrapping far_field_row.
InterferencePattern far_field_flux(const SpectralPacket& s, const DetectorConfig& det, double v,
                                   double weight = 1.0, bool include_fall = false);

// Free-fall remap of a sampled pattern: F'(x) = F(x + a_fall (D/v)^2 / 2), linear
// interpolation, zero outside the window.
InterferencePattern fall_shift(const InterferencePattern& p, const DetectorConfig& det);

// Gaussian in position (sigma = res_x/2) and boxcar in velocity (width v^2 res_t /
// tof_length, or res_v). Scatter form with per-source normalization over the window,
// so the pattern integral is preserved.
InterferencePattern convolve_resolution(const InterferencePattern& p, const DetectorConfig& det);

// Probability current into the mirror, reported positive:
//   F(z) = -exp(-t/tau) w (hbar/m) Im(psi* dpsi/dx)|_{x=0},  t = z/v,
// from amplitudes d given at time t0 in the basis `set` (no particle-decay factor
// applied to d). dpsi/dx uses a one-sided fourth-order difference.
std::vector<double> surface_current_row(const StateSet& set, const std::vector<cplx>& d, double t0,
                                        const std::vector<double>& z, double v,
                                        double lifetime = std::numeric_limits<double>::infinity(),
                                        double weight = 1.0);

// Flux-weighted mean visibility (max-min)/(max+min) between adjacent local maxima,
// ignoring maxima below 5% of each row's peak.
double fringe_contrast(const InterferencePattern& p);

// CSV dialect: '#'-prefixed "key: value" metadata lines (format, axes, units, then
// sorted meta), a column header, and one row per (position, velocity) sample.
void write_pattern_csv(std::ostream& os, const InterferencePattern& p);
InterferencePattern read_pattern_csv(std::istream& is);

}  // namespace wgsim
