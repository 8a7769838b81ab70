#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgsim/constants.hpp"
#include "wgsim/particle.hpp"
#include "wgsim/qr_model.hpp"

namespace wgsim {

// Order-of-magnitude design chain. All "~" relations are taken as equalities.
struct DesignInput {
    ParticleSpec particle;
    std::optional<QRModel> qr;
    std::optional<double> E_lim;  // J, overrides the QR model when set
    double beta = 10.0;
    double gamma = 3.0;
    std::optional<double> L;      // mirror length, m
    std::optional<double> v;      // longitudinal velocity, m/s
    std::optional<double> R;      // mirror radius (a cap when L is also given), m
    std::optional<double> t_cap;  // observation time, s
    double g = constants::standard_gravity;
};

struct DesignResult {
    double E_lim = 0;     // J (implied by gamma*E_WGS in kinematic closures)
    double E_wgs = 0;     // J
    double tau = 0;       // s
    double a = 0;         // m/s^2
    double v = 0;         // m/s
    double R = 0;         // m
    double L = 0;         // m
    double l = 0;         // m
    double dH = 0;        // suggested absorber height gamma*l, m
    double shift_ratio = 0;  // g/a
    double t_obs = 0;     // L/v, s
    double n_bounces = 0; // t_obs/tau
    double beta = 0;
    double gamma = 0;
    std::string closure;  // which constraint set closed the chain
    bool radius_capped = false;
    std::optional<double> model_E_lim;  // from the QR model, for kinematic closures
    std::vector<std::string> notes;
};

DesignResult design_wgs(const DesignInput& in);

struct MuDesignInput {
    ParticleSpec particle;
    std::optional<QRModel> qr;
    double v = 2.2e3;
    double a = 1e6;
    double lifetime_multiple = 3.0;
    double excited_states = 5.0;   // N in dH = (3+N) l
    double practical_gamma = 10.0; // above this the absorber has to select states
    double g = constants::standard_gravity;
};

struct MuDesignResult {
    DesignResult d;             // beta = lifetime/tau, gamma = 3+N
    std::optional<double> gamma_material;  // E_lim(beta)/E_WGS
    bool absorber_selection = false;
};

MuDesignResult design_mu(const MuDesignInput& in);

struct ReducedGravityInput {
    ParticleSpec particle;
    double beta = 3.0;
    double L = 1.0;
    double v = 2.0;
    double box_width = 1.0;        // W, m
    double passes = 40.0;          // pattern-growth budget: passes across the box
    double off_specular = 2e-3;    // loss probability per wall collision
    double collision_rate = 5.0;   // wall collisions per second
    double g = constants::standard_gravity;
};

struct ReducedGravityResult {
    double tau = 0, g_reduced = 0, tilt = 0, E = 0, v_perp = 0, l = 0;
    double t_obs = 0;          // passes * W / v
    double D = 0;              // v * t_obs
    double pattern_size = 0;   // 2 v_perp t_obs
    double t_limit = 0;        // 1/(rate * off_specular)
    double survival = 0;       // exp(-rate * off_specular * t_obs)
    std::vector<std::string> warnings;
};

ReducedGravityResult design_reduced_gravity(const ReducedGravityInput& in);

struct PhaseSpaceAcceptance {
    double height = 0;            // (gamma+2) l, m
    double velocity_extent = 0;   // 2 sqrt(2 E gamma/m), m/s
    double volume = 0;            // dY * height * velocity_extent, m^2 m/s
    double collimation_factor = 0;  // 2 sqrt(E gamma/m) / v / delta
    double accepted = 0;          // volume * collimation_factor
};

PhaseSpaceAcceptance phase_space_acceptance(const DesignResult& d, double mass, double width_dY,
                                            double delta = 5.0);

// Flat key=value rendering used by the CLI.
std::string format_design(const DesignResult& d);

}  // namespace wgsim
