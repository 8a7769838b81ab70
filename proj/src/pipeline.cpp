#include "wgsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <list>
#include <memory>
#include <mutex>
#include <tuple>

#ifdef WGSIM_HAVE_OPENMP
#include <omp.h>
#endif

#include "wgsim/airy.hpp"
#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/scales.hpp"

namespace wgsim {

using constants::hbar;
using constants::pi;

namespace {

constexpr std::size_t max_detector_points = 400001;
constexpr std::size_t max_current_points = 200001;

// Eigenproblems repeat across runs that vary only lengths, the detector or the
// outputs (a sweep over L, say), so recent state sets are kept per process.
class StateCache {
public:
    using Key = std::tuple<int, double, double, double, int, double, std::size_t, double, double>;

    template <class Solve>
    StateSet get(const Key& key, Solve&& solve) {
        {
            std::lock_guard lock(mu_);
            for (auto it = entries_.begin(); it != entries_.end(); ++it)
                if (it->first == key) {
                    entries_.splice(entries_.begin(), entries_, it);
                    return *it->second;
                }
        }
        auto set = std::make_shared<const StateSet>(solve());
        std::lock_guard lock(mu_);
        entries_.emplace_front(key, set);
        if (entries_.size() > capacity) entries_.pop_back();
        return *set;
    }

private:
    static constexpr std::size_t capacity = 16;
    std::mutex mu_;
    std::list<std::pair<Key, std::shared_ptr<const StateSet>>> entries_;
};

StateCache& state_cache() {
    static StateCache cache;
    return cache;
}

StateSet two_wall_cached(double m, double a, double dH, int n, const HeightGrid& g) {
    return state_cache().get({2, m, a, dH, n, g.x_max(), g.size(), 0.0, 0.0},
                             [&] { return solve_two_wall(m, a, dH, n, g); });
}

StateSet single_wall_cached(double m, double a, int n, const HeightGrid& g, cplx wall) {
    return state_cache().get({1, m, a, 0.0, n, g.x_max(), g.size(), wall.real(), wall.imag()},
                             [&] { return solve_single_wall(m, a, n, g, wall); });
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double lifetime_of(const Scenario& s, const ParticleSpec& p) {
    return s.numerics.ignore_lifetime ? std::numeric_limits<double>::infinity() : p.lifetime;
}

cplx wall_of(const Scenario& s) {
    if (s.mirror.wall == WallKind::hard) return {0.0, 0.0};
    if (s.numerics.lossless) return {s.mirror.wall_length.real(), 0.0};
    return s.mirror.wall_length;
}

bool has_open_mirror(const Scenario& s) { return s.mirror.length > s.absorber.length; }

// Height reached by the basis of the last mirror region.
double basis_height(const Scenario& s) {
    return has_open_mirror(s) ? s.numerics.basis_height_factor * s.absorber.height : s.absorber.height;
}

void add_warning(std::string& w, const std::string& msg) {
    if (!w.empty()) w += "; ";
    w += msg;
}

}  // namespace

double mirror_acceleration(const Scenario& s, double v) {
    const double g = s.accel.gravity ? s.accel.g : 0.0;
    if (!s.mirror.radius) return g;
    return centrifugal_acceleration(v, *s.mirror.radius) + (s.mirror.facing_down ? -g : g);
}

double fall_acceleration(const Scenario& s) {
    const double g = s.accel.gravity && s.accel.gravity_in_flight ? s.accel.g : 0.0;
    const double sign = s.mirror.radius && s.mirror.facing_down ? -1.0 : 1.0;
    return sign * g + s.accel.extra;
}

double beam_weight(const Scenario& s, double v) {
    if (s.beam.spectrum == Spectrum::flat) return 1.0;
    const double u = (v - s.beam.mean) / s.beam.sigma;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * pi) * s.beam.sigma);
}

DetectorConfig resolve_detector(const Scenario& s) {
    const auto& p = default_catalog().get(s.particle);
    DetectorConfig det;
    det.D = s.detector.D;
    det.a_fall = fall_acceleration(s);
    det.res_x = s.detector.res_x;
    det.res_t = s.detector.res_t;
    det.tof_length = s.detector.tof_length;
    det.res_v = s.detector.res_v;
    det.force_far_field = s.detector.force_far_field;

    const auto [vlo, vhi] = std::minmax_element(s.beam.velocities.begin(), s.beam.velocities.end());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, dx = lo;
    const double X = basis_height(s);
    for (double v : {*vlo, *vhi}) {
        const double a = mirror_acceleration(s, v);
        if (!(a > 0)) throw ValidationError(s.label() + ": mirror acceleration is not positive at v = " + num(v));
        const auto sc = characteristic_scales(p.mass, a);
        const double k0 = p.mass * v / hbar;
        const double k_ext = std::sqrt(2.0 * p.mass * p.mass * a * X) / hbar + 6.0 / sc.l;
        const double half = det.D * k_ext / k0;
        const double shift = 0.5 * det.a_fall * (det.D / v) * (det.D / v);
        lo = std::min(lo, -half - shift);
        hi = std::max(hi, half - shift);
        dx = std::min(dx, 2.0 * pi * det.D / (k0 * X) / s.numerics.samples_per_fringe);
    }
    if (s.detector.x_min) {
        lo = *s.detector.x_min;
        hi = *s.detector.x_max;
        if (!(hi > lo)) throw ValidationError(s.label() + ": detector.x_max must exceed x_min");
    }
    det.x_min = lo;
    det.x_max = hi;
    if (s.detector.n_x) {
        det.n_x = *s.detector.n_x;
    } else {
        const double n = std::ceil((hi - lo) / dx) + 1;
        if (n > double(max_detector_points))
            throw ValidationError(s.label() + ": detector grid needs " + num(n) +
                                  " points; set detector.x_min/x_max/n_x explicitly");
        det.n_x = static_cast<std::size_t>(n);
    }
    if (det.n_x < 2) throw ValidationError(s.label() + ": detector.n_x must be >= 2");
    return det;
}

std::vector<double> resolve_current_grid(const Scenario& s) {
    const auto& p = default_catalog().get(s.particle);
    const double z0 = s.outputs.z_min.value_or(s.absorber.length);
    const double z1 = s.outputs.z_max.value_or(s.mirror.length);
    if (!(z1 > z0)) throw ValidationError(s.label() + ": current z range is empty");
    if (z0 < s.absorber.length)
        throw ValidationError(s.label() + ": current z range starts inside the absorber region");
    std::size_t n = 401;
    if (s.outputs.n_z) {
        n = *s.outputs.n_z;
    } else {
        // narrowest beat: states spread up to about 1.5 dH after the absorber
        for (double v : s.beam.velocities) {
            const double dE = p.mass * mirror_acceleration(s, v) * 1.5 * s.absorber.height;
            const double period = 2.0 * pi * hbar * v / dE;
            const double need = std::ceil((z1 - z0) / period * s.numerics.samples_per_fringe) + 1;
            n = std::max(n, static_cast<std::size_t>(std::min(need, double(max_current_points))));
        }
    }
    if (n < 2) throw ValidationError(s.label() + ": outputs.n_z must be >= 2");
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = z0 + (z1 - z0) * double(i) / double(n - 1);
    return z;
}

VelocitySlice simulate_slice(const Scenario& s, const ParticleSpec& p, double v, const DetectorConfig& det,
                             const std::vector<double>& z, bool need_pattern, bool need_current) {
    VelocitySlice sl;
    sl.v = v;
    sl.a = mirror_acceleration(s, v);
    if (!(sl.a > 0)) throw ValidationError(s.label() + ": mirror acceleration is not positive at v = " + num(v));
    const double m = p.mass;
    const auto sc = characteristic_scales(m, sl.a);
    const double dH = s.absorber.height;
    const bool absorber = s.absorber.length > 0;
    const bool open = has_open_mirror(s);
    const double tau = lifetime_of(s, p);

    const int n_pop = count_states_below(m, sl.a, dH);
    const int n1 = n_pop + 1;
    const int n2 = std::max(count_states_below(m, sl.a, basis_height(s)), n_pop + 2);
    const auto zeros = airy_ai_zeros(n2);
    const double E_open = open ? sc.E * zeros.back() : 0.0;
    const double E_box = absorber ? hbar * hbar * pi * pi * n1 * n1 / (2 * m * dH * dH) + m * sl.a * dH : 0.0;
    const double E_max = std::max(E_open, E_box);
    const double h = std::min(sc.l / s.numerics.points_per_l,
                              0.98 * 2.0 * pi * hbar / std::sqrt(2.0 * m * E_max) / 16.0);
    const double x_max = open ? std::max(dH, E_open / (m * sl.a) + 8.0 * sc.l) : dH;
    const auto grid = HeightGrid::with_node(dH, h, x_max);
    const auto entry = plane_wave(grid, dH, s.beam.k_perp, v);

    StateSet last;
    std::vector<cplx> amps;
    WavePacket exit;
    if (absorber) {
        auto set1 = two_wall_cached(m, sl.a, dH, n1, grid);
        if (set1.states.empty()) {
            add_warning(sl.warning, "v=" + num(v) + ": " + set1.diagnostic);
            sl.row.assign(need_pattern ? det.n_x : 0, 0.0);
            sl.current.assign(need_current ? z.size() : 0, 0.0);
            return sl;
        }
        if (s.absorber.widths && !s.numerics.lossless) absorber_widths(set1, dH);
        for (const auto& st : set1.states) sl.populated += st.populated ? 1 : 0;
        const auto c1 = project(entry, set1);
        sl.norm_entry = norm(synthesize(set1, c1, v, 0.0));
        const double t1 = s.absorber.length / v;
        if (open) {
            const auto p1 = evolve(set1, c1, t1, v);
            last = single_wall_cached(m, sl.a, n2, grid, wall_of(s));
            amps = sudden_transition(p1, last);
            const double before = norm(p1);
            sl.basis_retained = before > 0 ? norm(synthesize(last, amps, v, t1)) / before : 1.0;
            sl.t0 = t1;
            exit = evolve(last, amps, (s.mirror.length - s.absorber.length) / v, v,
                          std::numeric_limits<double>::infinity(), t1);
        } else {
            last = std::move(set1);
            amps = c1;
            exit = evolve(last, amps, t1, v);
        }
    } else {
        last = single_wall_cached(m, sl.a, n2, grid, wall_of(s));
        amps = project(entry, last, true);
        sl.populated = n_pop;
        sl.norm_entry = norm(synthesize(last, amps, v, 0.0));
        exit = evolve(last, amps, s.mirror.length / v, v);
    }
    sl.norm_exit = norm(exit);
    sl.exit = exit;
    for (const auto& st : last.states) {
        sl.energies.push_back(st.E);
        sl.widths.push_back(st.Gamma);
    }
    sl.amplitudes = amps;
    if (std::isfinite(tau)) {
        sl.decay_exit = std::exp(-s.mirror.length / (v * tau));
        sl.decay_detector = std::exp(-(s.mirror.length + s.detector.D) / (v * tau));
    }

    if (need_pattern) {
        const auto spec = to_spectrum(exit, m, s.numerics.pad);
        sl.far_field_ratio = far_field_ratio(spec, det.D);
        std::string w;
        sl.row = far_field_row(spec, det, v, beam_weight(s, v) * sl.decay_detector, true, &w);
        if (!w.empty()) add_warning(sl.warning, "v=" + num(v) + ": " + w);
    }
    if (need_current) {
        sl.current = surface_current_row(last, amps, sl.t0, z, v, tau, beam_weight(s, v));
        if (last.wall_length == cplx(0.0, 0.0) && !std::isfinite(tau))
            add_warning(sl.warning, "v=" + num(v) + ": hard wall and stable particle, current is zero");
    }
    return sl;
}

SimulationResult simulate(const Scenario& s, const SimOptions& opt) {
    const auto& p = default_catalog().get(s.particle);
    SimulationResult r;
    r.scenario = s;
    r.hash = scene_hash(s);
    const bool want_pattern = opt.need_pattern && s.outputs.pattern;
    const bool want_current = opt.need_current && s.outputs.current;
    r.detector = resolve_detector(s);
    const auto z = want_current ? resolve_current_grid(s) : std::vector<double>{};

    const auto& vs = s.beam.velocities;
    r.slices.resize(vs.size());
    std::vector<std::exception_ptr> errors(vs.size());
#ifdef WGSIM_HAVE_OPENMP
    if (const char* env = std::getenv("WGSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(vs.size()); ++i) {
        try {
            r.slices[i] = simulate_slice(s, p, vs[i], r.detector, z, want_pattern, want_current);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::map<std::string, std::string> meta;
    meta["scene"] = s.name;
    if (!s.variant.empty()) meta["variant"] = s.variant;
    meta["scene_hash"] = r.hash;
    meta["particle"] = s.particle;
    meta["mirror_length_m"] = num(s.mirror.length);
    meta["absorber_height_m"] = num(s.absorber.height);
    meta["detector_distance_m"] = num(s.detector.D);
    meta["fall_acceleration_m_s2"] = num(r.detector.a_fall);
    double ratio_min = std::numeric_limits<double>::infinity();
    int pop_min = std::numeric_limits<int>::max(), pop_max = 0;
    for (const auto& sl : r.slices) {
        if (!sl.warning.empty()) r.warnings.push_back(sl.warning);
        if (sl.far_field_ratio > 0) ratio_min = std::min(ratio_min, sl.far_field_ratio);
        pop_min = std::min(pop_min, sl.populated);
        pop_max = std::max(pop_max, sl.populated);
    }
    meta["populated_states"] = pop_min == pop_max ? std::to_string(pop_min)
                                                  : std::to_string(pop_min) + ".." + std::to_string(pop_max);
    if (!r.warnings.empty()) meta["warnings"] = std::to_string(r.warnings.size());

    const Axis vel{"v", "m/s", vs};
    if (want_pattern) {
        Axis x{"x", "m", std::vector<double>(r.detector.n_x)};
        for (std::size_t i = 0; i < r.detector.n_x; ++i)
            x.values[i] = r.detector.x_min +
                          (r.detector.x_max - r.detector.x_min) * double(i) / double(r.detector.n_x - 1);
        auto pat = make_pattern(x, vel, "1/m");
        for (std::size_t j = 0; j < vs.size(); ++j)
            std::copy(r.slices[j].row.begin(), r.slices[j].row.end(), pat.F.begin() + j * r.detector.n_x);
        for (const auto& [k, v] : meta) pat.meta[k] = v;
        pat.meta["far_field_ratio_min"] = num(ratio_min);
        pat.meta["x_grid_rule"] = s.detector.n_x ? "explicit"
                                                 : num(s.numerics.samples_per_fringe) +
                                                       " samples per fringe 2 pi D/(k0 X), X = " +
                                                       num(basis_height(s)) + " m";
        r.pattern = pat;
        if (s.detector.res_x > 0 || s.detector.res_t > 0 || s.detector.res_v > 0)
            r.convolved = convolve_resolution(pat, r.detector);
    }
    if (want_current) {
        auto cur = make_pattern(Axis{"z", "m", z}, vel, "1/s");
        for (std::size_t j = 0; j < vs.size(); ++j)
            std::copy(r.slices[j].current.begin(), r.slices[j].current.end(), cur.F.begin() + j * z.size());
        for (const auto& [k, v] : meta) cur.meta[k] = v;
        cur.meta["quantity"] = "probability current into the mirror";
        r.current = cur;
        if (vs.size() > 1) {
            auto tot = make_pattern(Axis{"z", "m", z}, Axis{"v", "m/s", {0.0}}, "1/s");
            const auto wv = cur.vel_weights();
            for (std::size_t j = 0; j < vs.size(); ++j)
                for (std::size_t i = 0; i < z.size(); ++i) tot.F[i] += cur.at(j, i) * wv[j];
            tot.meta = cur.meta;
            tot.meta["quantity"] = "probability current into the mirror, integrated over v";
            tot.meta["velocity_axis"] = "integrated";
            r.current_integrated = tot;
        }
    }
    if (!opt.keep_slices)
        for (auto& sl : r.slices) {
            sl.row.clear();
            sl.current.clear();
        }
    return r;
}

PatternGenerator scene_generator(const Scenario& s) {
    Scenario base = s;
    const auto det = resolve_detector(s);
    base.detector.x_min = det.x_min;
    base.detector.x_max = det.x_max;
    base.detector.n_x = det.n_x;
    base.outputs.current = false;
    const auto param = s.outputs.parameter;
    return [base, param](double a) {
        Scenario t = base;
        if (param == SensitivityParameter::g)
            t.accel.g = a;
        else
            t.accel.extra = a;
        const auto r = simulate(t, {true, false, false});
        auto d = normalize_density(r.convolved ? *r.convolved : *r.pattern);
        d.meta["density_source"] = r.convolved ? "convolved flux" : "raw flux";
        return d;
    };
}

SceneSensitivity scene_sensitivity(const Scenario& s, std::optional<double> events,
                                   std::optional<double> step_rel) {
    SceneSensitivity out;
    const double N = events.value_or(s.outputs.events);
    const double rel = step_rel.value_or(s.outputs.step_rel);
    const bool g_mode = s.outputs.parameter == SensitivityParameter::g;
    const double a0 = g_mode ? s.accel.g : s.accel.extra;
    const double ref = a0 != 0.0 ? std::abs(a0) : s.accel.g;
    SensitivityProblem pr{scene_generator(s), a0, N, rel * ref,
                          "all other scene parameters held at their nominal values"};
    out.fisher = fisher_information(pr);
    out.sigma = out.fisher.I > 0 ? cramer_rao(out.fisher.I, N) : std::numeric_limits<double>::infinity();
    out.relative = out.sigma / ref;
    out.report = format_fisher(out.fisher, N);
    static const char* names[] = {"g", "extra", "charge"};
    out.report += std::string("parameter=") + names[static_cast<int>(s.outputs.parameter)] + "\n";
    out.report += "a0=" + num(a0) + "\n";
    out.report += "sigma_relative=" + num(out.relative) + "\n";
    if (s.outputs.parameter == SensitivityParameter::charge) {
        const auto& p = default_catalog().get(s.particle);
        out.sigma_charge = out.sigma * p.mass / s.outputs.field;
        out.report += "field_V_m=" + num(s.outputs.field) + "\n";
        out.report += "sigma_charge_C=" + num(out.sigma_charge) + "\n";
        out.report += "sigma_charge_e=" + num(out.sigma_charge / constants::elementary_charge) + "\n";
    }
    out.report += "scene_hash=" + scene_hash(s) + "\n";
    return out;
}

std::vector<std::string> write_outputs(const SimulationResult& r, const std::string& dir) {
    std::vector<std::string> paths;
    auto put = [&](const InterferencePattern& p, const std::string& suffix) {
        const auto path = dir + "/" + r.scenario.label() + suffix + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path + "'");
        write_pattern_csv(out, p);
        if (!out) throw IoError("write failed for '" + path + "'");
        paths.push_back(path);
    };
    if (r.pattern) put(*r.pattern, "");
    if (r.convolved) put(*r.convolved, "_convolved");
    if (r.current) put(*r.current, "_current");
    if (r.current_integrated) put(*r.current_integrated, "_current_integrated");
    return paths;
}

}  // namespace wgsim
