#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgsim/constants.hpp"

namespace YAML {
class Node;
}

namespace wgsim {

enum class WallKind { hard, scattering_length };
enum class Spectrum { flat, gaussian };
enum class SensitivityParameter { g, extra, charge };

// One fully specified pipeline run. All quantities are SI; the file format carries
// the unit in each key name (mirror.length_m, absorber.height_um, ...).
struct Scenario {
    std::string name;
    std::string variant;  // empty for single-run scenes
    std::string description;
    std::string particle;
    long seed = 0;

    struct Mirror {
        double length = 0.0;
        std::optional<double> radius;  // unset: flat mirror
        bool facing_down = false;      // curved mirror above the beam, gravity pulls away
        WallKind wall = WallKind::hard;
        std::complex<double> wall_length{0.0, 0.0};
    } mirror;

    struct Absorber {
        double length = 0.0;  // measured from the mirror entrance
        double height = 0.0;  // also the entrance aperture
        bool widths = true;   // WKB tunnelling widths on the populated states
    } absorber;

    struct Accelerations {
        bool gravity = true;
        double g = constants::standard_gravity;
        double extra = 0.0;          // acts on the free flight only
        bool gravity_in_flight = true;
    } accel;

    struct Beam {
        std::vector<double> velocities;
        Spectrum spectrum = Spectrum::flat;  // weight n(v) v
        double mean = 0.0, sigma = 0.0;
        double k_perp = 0.0;
    } beam;

    struct Detector {
        double D = 1.0;
        double tof_length = 0.0;
        double res_x = 0.0, res_t = 0.0, res_v = 0.0;
        std::optional<double> x_min, x_max;
        std::optional<std::size_t> n_x;
        bool force_far_field = false;
    } detector;

    struct Outputs {
        bool pattern = true;
        bool current = false;
        std::optional<double> z_min, z_max;
        std::optional<std::size_t> n_z;
        bool sensitivity = false;
        SensitivityParameter parameter = SensitivityParameter::g;
        double events = 1.0;
        double step_rel = 1e-4;  // da relative to the parameter (or to g for extra/charge)
        double field = 0.0;      // V/m, charge mode
    } outputs;

    struct Numerics {
        double points_per_l = 80.0;
        double basis_height_factor = 2.0;  // single-wall basis reaches this multiple of dH
        int pad = 2;
        double samples_per_fringe = 8.0;
        bool ignore_lifetime = false;
        bool lossless = false;  // no absorber widths, no wall loss
    } numerics;

    std::string label() const { return variant.empty() ? name : name + "-" + variant; }
};

// Parses a scene file into one scenario per variant (or a single scenario).
// `overrides` are dotted-path assignments ("mirror.length_m=0.5") applied to the
// base document before variants. Errors name the offending field path.
std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& origin,
                                      const std::vector<std::pair<std::string, std::string>>& overrides = {});
std::vector<Scenario> load_scenarios(const std::string& path,
                                     const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Canonical SI key=value rendering, one line per field in a fixed order.
std::string canonical(const Scenario& s);
// SHA-256 of canonical(s), lowercase hex.
std::string scene_hash(const Scenario& s);

// Splits "a.b.c=value" at the first '='.
std::pair<std::string, std::string> split_assignment(const std::string& s);

}  // namespace wgsim
