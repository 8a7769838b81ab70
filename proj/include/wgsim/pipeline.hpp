#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wgsim/particle.hpp"
#include "wgsim/propagation.hpp"
#include "wgsim/scenario.hpp"
#include "wgsim/sensitivity.hpp"

namespace wgsim {

// Geometry seen by one velocity slice.
double mirror_acceleration(const Scenario& s, double v);  // GQS: g, WGS: v^2/R -+ g
double fall_acceleration(const Scenario& s);              // toward -x during the free flight
double beam_weight(const Scenario& s, double v);          // n(v) v

// Everything computed for one longitudinal velocity.
struct VelocitySlice {
    double v = 0.0;
    double a = 0.0;                 // mirror acceleration
    int populated = 0;              // states passing the absorber
    double norm_entry = 0.0;        // after projection onto the populated absorber states
    double norm_exit = 0.0;         // at the mirror exit, without particle decay
    double basis_retained = 1.0;    // norm kept by the sudden transition to the open mirror
    double decay_exit = 1.0;        // exp(-L/(v tau))
    double decay_detector = 1.0;    // exp(-(L+D)/(v tau))
    double far_field_ratio = 0.0;
    std::string warning;
    std::vector<double> energies;   // basis of the last mirror region, J
    std::vector<double> widths;     // Gamma, J
    std::vector<cplx> amplitudes;   // in that basis at its start time t0 (no decay factor)
    double t0 = 0.0;
    WavePacket exit;                // at the mirror exit, without particle decay
    std::vector<double> row;        // detector flux with free fall
    std::vector<double> current;    // surface current over the z grid
};

struct SimulationResult {
    Scenario scenario;
    std::string hash;
    std::vector<VelocitySlice> slices;
    std::optional<InterferencePattern> pattern;     // raw detector flux
    std::optional<InterferencePattern> convolved;   // after the resolution functions
    std::optional<InterferencePattern> current;     // surface current F(z, v)
    std::optional<InterferencePattern> current_integrated;  // summed over v
    DetectorConfig detector;                         // resolved grid
    std::vector<std::string> warnings;
};

struct SimOptions {
    bool need_pattern = true;
    bool need_current = true;
    bool keep_slices = true;
};

// Detector grid for a scene: explicit settings win; otherwise the window holds the
// spectral support (k_max + 6/l) of the fastest and slowest rows after their fall,
// sampled at samples_per_fringe points per narrowest fringe 2 pi z / (k0 X).
DetectorConfig resolve_detector(const Scenario& s);
// z grid for the surface current over the open mirror, or the explicit outputs range.
std::vector<double> resolve_current_grid(const Scenario& s);

VelocitySlice simulate_slice(const Scenario& s, const ParticleSpec& p, double v, const DetectorConfig& det,
                             const std::vector<double>& z, bool need_pattern, bool need_current);

// Runs every velocity (in parallel when built with OpenMP; WGSIM_THREADS caps the
// thread count). Output is independent of the thread count.
SimulationResult simulate(const Scenario& s, const SimOptions& opt = {});

// Normalized density used by the sensitivity module: the convolved flux (or the raw
// flux when the scene has no resolution) divided by its integral over the window.
PatternGenerator scene_generator(const Scenario& s);

struct SceneSensitivity {
    FisherResult fisher;
    double sigma = 0.0;           // on the acceleration, m/s^2
    double relative = 0.0;        // sigma / reference acceleration
    double sigma_charge = 0.0;    // C, charge mode only
    std::string report;           // key=value lines
};
SceneSensitivity scene_sensitivity(const Scenario& s, std::optional<double> events = std::nullopt,
                                   std::optional<double> step_rel = std::nullopt);

// Writes <dir>/<label>[_suffix].csv files for every output the scene requests and
// returns their paths.
std::vector<std::string> write_outputs(const SimulationResult& r, const std::string& dir);

}  // namespace wgsim
