#include "wgsim/design.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "wgsim/errors.hpp"
#include "wgsim/scales.hpp"

namespace wgsim {

using constants::hbar;

namespace {

void fill_geometry(DesignResult& r, const DesignInput& in) {
    r.R = r.v * r.v / r.a;
    r.l = r.E_wgs / (in.particle.mass * r.a);
    r.dH = r.gamma * r.l;
    r.shift_ratio = in.g / r.a;
    r.t_obs = r.L / r.v;
    r.n_bounces = r.t_obs / r.tau;
}

std::string set_list(const DesignInput& in) {
    std::string s;
    auto add = [&](bool on, const char* n) {
        if (on) s += (s.empty() ? "" : ", ") + std::string(n);
    };
    add(in.L.has_value(), "L");
    add(in.v.has_value(), "v");
    add(in.R.has_value(), "R");
    add(in.t_cap.has_value(), "t_cap");
    return s.empty() ? "none" : s;
}

}  // namespace

DesignResult design_wgs(const DesignInput& in) {
    if (!(in.beta >= 1.0)) throw ValidationError("design: beta must be >= 1");
    if (!(in.gamma >= 3.0)) throw ValidationError("design: gamma must be >= 3");
    if (!(in.particle.mass > 0.0)) throw ValidationError("design: particle mass must be > 0");
    for (auto [opt, name] : {std::pair{in.L, "L"}, {in.v, "v"}, {in.R, "R"}, {in.t_cap, "t_cap"}})
        if (opt && !(*opt > 0.0)) throw ValidationError(std::string("design: ") + name + " must be > 0");

    DesignResult r;
    r.beta = in.beta;
    r.gamma = in.gamma;
    const bool L = in.L.has_value(), v = in.v.has_value(), R = in.R.has_value(),
               T = in.t_cap.has_value();

    std::optional<double> model_elim;
    if (in.E_lim)
        model_elim = *in.E_lim;
    else if (in.qr)
        model_elim = effective_critical_energy(*in.qr, in.beta, in.particle.mass);

    auto energy_limited = [&] {
        if (!model_elim)
            throw ValidationError("design: closure by " + set_list(in) +
                                  " needs E_lim or a QR model");
        r.E_lim = *model_elim;
        r.E_wgs = r.E_lim / r.gamma;
        r.tau = hbar / r.E_wgs;
        r.a = acceleration_for_time(in.particle.mass, r.tau);
    };
    auto kinematic = [&](double tau) {
        r.tau = tau;
        r.E_wgs = hbar / tau;
        r.E_lim = r.gamma * r.E_wgs;
        r.a = acceleration_for_time(in.particle.mass, tau);
        r.model_E_lim = model_elim;
    };

    if (L && !v && !T) {
        energy_limited();
        r.L = *in.L;
        r.v = r.L / (r.beta * r.tau);
        r.closure = "L";
        if (R) {
            r.closure = "L,R";
            if (r.v * r.v / r.a > *in.R) {
                r.v = std::sqrt(r.a * *in.R);
                r.radius_capped = true;
                r.notes.push_back("radius cap binds: v = sqrt(a R), bounce count exceeds beta");
            }
        }
    } else if (v && !L && !R && !T) {
        energy_limited();
        r.v = *in.v;
        r.L = r.v * r.beta * r.tau;
        r.closure = "v";
    } else if (R && !L && !v && !T) {
        energy_limited();
        r.v = std::sqrt(r.a * *in.R);
        r.L = r.v * r.beta * r.tau;
        r.closure = "R";
    } else if (L && v && !R && !T) {
        kinematic(*in.L / (in.beta * *in.v));
        r.L = *in.L;
        r.v = *in.v;
        r.closure = "L,v";
    } else if (T && v && !L && !R) {
        kinematic(*in.t_cap / in.beta);
        r.v = *in.v;
        r.L = r.v * *in.t_cap;
        r.closure = "t_cap,v";
    } else if (T && L && !v && !R) {
        kinematic(*in.t_cap / in.beta);
        r.L = *in.L;
        r.v = r.L / *in.t_cap;
        r.closure = "t_cap,L";
    } else {
        throw ValidationError(
            "design: constraints {" + set_list(in) +
            "} do not close the chain; use one of {L}, {v}, {R}, {L,R}, {L,v}, {t_cap,v}, "
            "{t_cap,L}");
    }
    fill_geometry(r, in);
    if (r.model_E_lim && std::abs(*r.model_E_lim / r.E_lim - 1.0) > 0.5)
        r.notes.push_back("kinematic closure: implied E_lim differs from the QR model by more "
                          "than 50%");
    return r;
}

MuDesignResult design_mu(const MuDesignInput& in) {
    if (!in.particle.decays()) throw ValidationError("design_mu: particle must have a lifetime");
    if (!(in.v > 0 && in.a > 0 && in.lifetime_multiple > 0))
        throw ValidationError("design_mu: v, a and lifetime multiple must be > 0");
    MuDesignResult out;
    auto& d = out.d;
    const auto s = characteristic_scales(in.particle.mass, in.a);
    d.a = in.a;
    d.v = in.v;
    d.tau = s.tau;
    d.E_wgs = s.E;
    d.l = s.l;
    d.L = in.v * in.lifetime_multiple * in.particle.lifetime;
    d.beta = in.particle.lifetime / s.tau;
    d.gamma = 3.0 + in.excited_states;
    d.R = in.v * in.v / in.a;
    d.dH = d.gamma * d.l;
    d.shift_ratio = in.g / in.a;
    d.t_obs = d.L / d.v;
    d.n_bounces = d.t_obs / d.tau;
    d.closure = "mu-source";
    if (in.qr) {
        d.E_lim = effective_critical_energy(*in.qr, std::max(1.0, d.beta), in.particle.mass);
        out.gamma_material = d.E_lim / d.E_wgs;
        out.absorber_selection = *out.gamma_material > in.practical_gamma;
    }
    return out;
}

ReducedGravityResult design_reduced_gravity(const ReducedGravityInput& in) {
    if (!(in.beta > 0 && in.L > 0 && in.v > 0))
        throw ValidationError("design_reduced_gravity: beta, L and v must be > 0");
    if (std::abs(in.particle.mass / constants::neutron_mass - 1.0) > 0.01)
        throw ValidationError("design_reduced_gravity: particle must have the neutron mass");
    ReducedGravityResult r;
    r.tau = in.L / (in.beta * in.v);
    r.g_reduced = acceleration_for_time(in.particle.mass, r.tau);
    r.tilt = r.g_reduced / in.g;
    if (r.tilt > 0.1) r.warnings.push_back("tilt above 0.1 rad: small-angle treatment breaks down");
    const auto s = characteristic_scales(in.particle.mass, r.g_reduced);
    r.E = s.E;
    r.l = s.l;
    r.v_perp = std::sqrt(2.0 * s.E / in.particle.mass);
    r.t_obs = in.passes * in.box_width / in.v;
    r.D = in.v * r.t_obs;
    r.pattern_size = 2.0 * r.v_perp * r.t_obs;
    r.t_limit = 1.0 / (in.collision_rate * in.off_specular);
    r.survival = std::exp(-in.collision_rate * in.off_specular * r.t_obs);
    if (r.t_obs > r.t_limit) r.warnings.push_back("observation time exceeds off-specular limit");
    return r;
}

PhaseSpaceAcceptance phase_space_acceptance(const DesignResult& d, double mass, double dY,
                                            double delta) {
    if (!(delta >= 1.0)) throw ValidationError("phase_space_acceptance: delta must be >= 1");
    if (!(dY > 0.0)) throw ValidationError("phase_space_acceptance: beam width must be > 0");
    PhaseSpaceAcceptance p;
    p.height = (d.gamma + 2.0) * d.l;
    p.velocity_extent = 2.0 * std::sqrt(2.0 * d.E_wgs * d.gamma / mass);
    p.volume = dY * p.height * p.velocity_extent;
    p.collimation_factor = 2.0 * std::sqrt(d.E_wgs * d.gamma / mass) / d.v / delta;
    p.accepted = p.volume * p.collimation_factor;
    return p;
}

std::string format_design(const DesignResult& d) {
    std::ostringstream o;
    auto kv = [&](const char* k, double v, const char* unit) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s=%.6g%s%s\n", k, v, *unit ? " " : "", unit);
        o << buf;
    };
    o << "closure=" << d.closure << "\n";
    kv("E_lim_eV", d.E_lim / constants::eV, "");
    kv("E_wgs_eV", d.E_wgs / constants::eV, "");
    kv("tau_s", d.tau, "");
    kv("a_m_s2", d.a, "");
    kv("v_m_s", d.v, "");
    kv("R_m", d.R, "");
    kv("L_m", d.L, "");
    kv("l_m", d.l, "");
    kv("dH_m", d.dH, "");
    kv("shift_ratio", d.shift_ratio, "");
    kv("t_obs_s", d.t_obs, "");
    kv("n_bounces", d.n_bounces, "");
    kv("beta", d.beta, "");
    kv("gamma", d.gamma, "");
    o << "radius_capped=" << (d.radius_capped ? "true" : "false") << "\n";
    if (d.model_E_lim) kv("model_E_lim_eV", *d.model_E_lim / constants::eV, "");
    for (const auto& n : d.notes) o << "note=" << n << "\n";
    return o.str();
}

}  // namespace wgsim
