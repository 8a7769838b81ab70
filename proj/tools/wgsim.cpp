// wgsim command-line front end: design, simulate, sensitivity, sweep, scenes.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wgsim/constants.hpp"
#include "wgsim/design.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/particle.hpp"
#include "wgsim/pipeline.hpp"
#include "wgsim/qr_model.hpp"
#include "wgsim/scenario.hpp"

#include <yaml-cpp/exceptions.h>

namespace fs = std::filesystem;
using namespace wgsim;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

std::string data_dir() { return env_or("WGSIM_DATA_DIR", WGSIM_DATA_DIR); }
std::string scene_dir() { return env_or("WGSIM_SCENES_DIR", WGSIM_SCENE_DIR); }

std::string output_dir(const std::string& flag) {
    const auto dir = flag.empty() ? env_or("WGSIM_OUTPUT_DIR", ".") : flag;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// A bare scene name resolves to the shipped scene of that name.
std::string scene_path(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    const auto shipped = fs::path(scene_dir()) / (arg + ".yaml");
    if (fs::exists(shipped)) return shipped.string();
    throw IoError("scene file '" + arg + "' not found");
}

std::vector<Scenario> load(const std::string& scene, const std::vector<std::string>& sets,
                           const std::string& orientation, const std::string& variant) {
    Overrides ov;
    for (const auto& s : sets) ov.push_back(split_assignment(s));
    if (!orientation.empty()) ov.emplace_back("mirror.orientation", orientation);
    auto all = load_scenarios(scene_path(scene), ov);
    if (variant.empty()) return all;
    std::vector<Scenario> picked;
    for (auto& s : all)
        if (s.variant == variant) picked.push_back(std::move(s));
    if (picked.empty()) throw ValidationError("scene '" + scene + "' has no variant '" + variant + "'");
    return picked;
}

std::optional<QRModel> default_qr(const std::string& particle) {
    static const std::map<std::string, std::string> tables = {
        {"H", "silica_H.tab"}, {"Hbar", "silica_Hbar.tab"}, {"Mu", "silica_Mu.tab"},
        {"Ps1S", "wall_Ps.tab"}, {"Ps2S", "wall_Ps.tab"}, {"Ps33", "wall_Ps.tab"}};
    const auto it = tables.find(particle);
    if (it == tables.end()) return std::nullopt;
    return QRModel::load_table(data_dir() + "/qr/" + it->second, "table");
}

// ---------------------------------------------------------------- design

struct DesignArgs {
    std::string mode = "wgs";
    std::string particle;
    std::string table;
    std::optional<double> b, E_lim_eV, L, v, R, t_cap, a, beta;
    double gamma = 3.0, g = constants::standard_gravity;
    double lifetimes = 3.0, excited = 5.0, passes = 40.0, box = 1.0, delta = 5.0;
};

void cmd_design(const DesignArgs& a) {
    const auto& p = default_catalog().get(a.particle);
    if (a.mode == "reduced") {
        ReducedGravityInput in;
        in.particle = p;
        in.beta = a.beta.value_or(in.beta);
        in.L = a.L.value_or(1.0);
        in.v = a.v.value_or(2.0);
        in.passes = a.passes;
        in.box_width = a.box;
        in.g = a.g;
        const auto r = design_reduced_gravity(in);
        std::cout << "tau=" << num(r.tau) << "\ng_reduced=" << num(r.g_reduced) << "\ntilt=" << num(r.tilt)
                  << "\nE=" << num(r.E) << "\nE_neV=" << num(r.E / constants::eV * 1e9)
                  << "\nv_perp=" << num(r.v_perp) << "\nl=" << num(r.l) << "\nt_obs=" << num(r.t_obs)
                  << "\nD=" << num(r.D) << "\npattern_size=" << num(r.pattern_size)
                  << "\nt_limit=" << num(r.t_limit) << "\nsurvival=" << num(r.survival) << "\n";
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        return;
    }

    std::optional<QRModel> qr;
    if (!a.table.empty())
        qr = QRModel::load_table(a.table, "table");
    else if (a.b)
        qr = QRModel::scattering_length({0.0, -std::abs(*a.b)}, "scattering_length");
    else
        qr = default_qr(a.particle);

    if (a.mode == "mu") {
        MuDesignInput in;
        in.particle = p;
        in.qr = qr;
        if (a.v) in.v = *a.v;
        if (a.a) in.a = *a.a;
        in.lifetime_multiple = a.lifetimes;
        in.excited_states = a.excited;
        in.g = a.g;
        const auto r = design_mu(in);
        std::cout << format_design(r.d);
        if (r.gamma_material) std::cout << "gamma_material=" << num(*r.gamma_material) << "\n";
        std::cout << "absorber_selection=" << (r.absorber_selection ? "true" : "false") << "\n";
        return;
    }
    if (a.mode != "wgs") throw ValidationError("design: --mode must be wgs, mu or reduced");

    DesignInput in;
    in.particle = p;
    in.qr = qr;
    if (a.E_lim_eV) in.E_lim = *a.E_lim_eV * constants::eV;
    in.beta = a.beta.value_or(in.beta);
    in.gamma = a.gamma;
    in.L = a.L;
    in.v = a.v;
    in.R = a.R;
    in.t_cap = a.t_cap;
    in.g = a.g;
    const auto d = design_wgs(in);
    std::cout << format_design(d);
    const auto acc = phase_space_acceptance(d, p.mass, 1.0, a.delta);
    std::cout << "acceptance_height=" << num(acc.height) << "\nacceptance_velocity_extent="
              << num(acc.velocity_extent) << "\ncollimation_factor=" << num(acc.collimation_factor) << "\n";
}

// ---------------------------------------------------------------- simulate

void print_warnings(const SimulationResult& r) {
    constexpr std::size_t shown = 3;
    for (std::size_t i = 0; i < std::min(shown, r.warnings.size()); ++i)
        std::cerr << "warning: " << r.scenario.label() << ": " << r.warnings[i] << "\n";
    if (r.warnings.size() > shown)
        std::cerr << "warning: " << r.scenario.label() << ": " << r.warnings.size() - shown
                  << " more velocity slices with warnings\n";
}

void cmd_simulate(const std::string& scene, const std::vector<std::string>& sets, const std::string& orientation,
                  const std::string& variant, const std::string& out) {
    const auto dir = output_dir(out);
    for (const auto& s : load(scene, sets, orientation, variant)) {
        const auto r = simulate(s, {s.outputs.pattern, s.outputs.current, false});
        print_warnings(r);
        for (const auto& path : write_outputs(r, dir)) std::cout << path << "\n";
    }
}

// ---------------------------------------------------------------- sensitivity

void cmd_sensitivity(const std::string& scene, const std::vector<std::string>& sets, const std::string& variant,
                     std::optional<double> events, std::optional<double> step, const std::string& out) {
    const auto dir = output_dir(out);
    bool any = false;
    for (const auto& s : load(scene, sets, "", variant)) {
        if (!s.outputs.sensitivity && variant.empty()) continue;
        any = true;
        const auto r = scene_sensitivity(s, events, step);
        std::cout << "# " << s.label() << "\n" << r.report;
        const auto path = dir + "/" + s.label() + "_dPda.csv";
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot write '" + path + "'");
        write_pattern_csv(os, r.fisher.dP);
        if (!os) throw IoError("write failed for '" + path + "'");
        std::cout << "dPda_csv=" << path << "\n";
    }
    if (!any) throw ValidationError("scene '" + scene + "' requests no sensitivity output");
}

// ---------------------------------------------------------------- sweep

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

// key=v1,v2,... or key=start:stop:count (inclusive, linear)
SweepAxis parse_axis(const std::string& spec) {
    auto [key, rhs] = split_assignment(spec);
    SweepAxis ax{key, {}};
    if (std::count(rhs.begin(), rhs.end(), ':') == 2) {
        double lo, hi;
        long n;
        char c1, c2;
        std::istringstream is(rhs);
        if (!(is >> lo >> c1 >> hi >> c2 >> n) || n < 1)
            throw ValidationError("sweep: bad range '" + spec + "'");
        for (long i = 0; i < n; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", n == 1 ? lo : lo + (hi - lo) * i / double(n - 1));
            ax.values.emplace_back(buf);
        }
    } else {
        std::istringstream is(rhs);
        for (std::string v; std::getline(is, v, ',');)
            if (!v.empty()) ax.values.push_back(v);
    }
    if (ax.values.empty()) throw ValidationError("sweep: no values for '" + key + "'");
    return ax;
}

std::vector<Overrides> sweep_points(const std::vector<SweepAxis>& axes, bool zip) {
    std::vector<Overrides> pts;
    if (zip) {
        const auto n = axes.front().values.size();
        for (const auto& a : axes)
            if (a.values.size() != n) throw ValidationError("sweep: --zip needs equally long value lists");
        for (std::size_t i = 0; i < n; ++i) {
            Overrides o;
            for (const auto& a : axes) o.emplace_back(a.key, a.values[i]);
            pts.push_back(o);
        }
        return pts;
    }
    pts.emplace_back();
    for (const auto& a : axes) {
        std::vector<Overrides> next;
        for (const auto& p : pts)
            for (const auto& v : a.values) {
                auto o = p;
                o.emplace_back(a.key, v);
                next.push_back(o);
            }
        pts = std::move(next);
    }
    return pts;
}

// Summary metrics of one run, in the column order of the sweep header.
std::string metrics_row(const SimulationResult& r) {
    double wsum = 0, trans = 0, ffr = std::numeric_limits<double>::infinity();
    int pop_min = 1 << 30, pop_max = 0;
    for (const auto& sl : r.slices) {
        const double w = beam_weight(r.scenario, sl.v);
        wsum += w;
        trans += w * sl.norm_exit * sl.basis_retained * sl.decay_exit;
        pop_min = std::min(pop_min, sl.populated);
        pop_max = std::max(pop_max, sl.populated);
        if (sl.far_field_ratio > 0) ffr = std::min(ffr, sl.far_field_ratio);
    }
    const InterferencePattern* pat = r.convolved ? &*r.convolved : (r.pattern ? &*r.pattern : nullptr);
    double peak_current = 0;
    if (r.current_integrated)
        for (double x : r.current_integrated->F) peak_current = std::max(peak_current, x);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g", pop_min, pop_max, wsum > 0 ? trans / wsum : 0.0,
                  pat ? fringe_contrast(*pat) : 0.0, peak_current, std::isfinite(ffr) ? ffr : 0.0);
    return buf;
}

void cmd_sweep(const std::string& scene, const std::vector<std::string>& sets, const std::string& variant,
               const std::vector<std::string>& vary, bool zip, const std::string& out_file) {
    if (vary.empty()) throw ValidationError("sweep: give at least one --vary key=values");
    std::vector<SweepAxis> axes;
    for (const auto& v : vary) axes.push_back(parse_axis(v));
    const auto points = sweep_points(axes, zip);

    // base scenario validates the file before any work starts
    const auto base = load(scene, sets, "", variant);
    if (base.size() != 1)
        throw ValidationError("sweep: scene has " + std::to_string(base.size()) + " variants, pick one with --variant");

    const auto journal_path = out_file + ".journal";
    std::map<long, std::string> done;
    if (std::ifstream j(journal_path); j) {
        for (std::string line; std::getline(j, line);) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;  // torn last line from an interrupted run
            try {
                done[std::stol(line.substr(0, comma))] = line.substr(comma + 1);
            } catch (const std::exception&) {
            }
        }
    }
    std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
    if (!journal) throw IoError("cannot open journal '" + journal_path + "'");

    std::vector<long> todo;
    for (long i = 0; i < static_cast<long>(points.size()); ++i)
        if (!done.count(i)) todo.push_back(i);
    std::cerr << "sweep: " << points.size() << " points, " << done.size() << " already in the journal\n";

    std::mutex writer;  // the single writer of the journal and the result map
    std::optional<Error> failure;
#ifdef WGSIM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long k = 0; k < static_cast<long>(todo.size()); ++k) {
        const long i = todo[k];
        try {
            const auto& ov = points[i];
            auto flat = sets;
            for (const auto& [key, val] : ov) flat.push_back(key + "=" + val);
            const auto sc = load(scene, flat, "", variant);
            const auto& s = sc.front();
            const auto r = simulate(s, {s.outputs.pattern, s.outputs.current, true});
            std::string row;
            for (const auto& [key, val] : ov) row += val + ",";
            row += scene_hash(s) + "," + metrics_row(r);
            std::lock_guard lock(writer);
            journal << i << "," << row << "\n" << std::flush;
            done[i] = row;
        } catch (const Error& e) {
            std::lock_guard lock(writer);
            if (!failure) failure = e;
        }
    }
    if (failure) throw *failure;

    std::ofstream os(out_file, std::ios::binary);
    if (!os) throw IoError("cannot write '" + out_file + "'");
    os << "# format: wgsim-sweep 1\n# scene: " << base.front().label() << "\n# base_scene_hash: "
       << scene_hash(base.front()) << "\n# mode: " << (zip ? "list" : "cartesian") << "\n";
    for (const auto& a : axes) os << "# axis: " << a.key << "\n";
    os << "# units: transmission is the weighted mirror-exit probability; current_peak in 1/s\n";
    for (const auto& a : axes) os << a.key << ",";
    os << "scene_hash,populated_min,populated_max,transmission,contrast,current_peak,far_field_ratio_min\n";
    for (const auto& [i, row] : done)
        if (i < static_cast<long>(points.size())) os << row << "\n";
    if (!os) throw IoError("write failed for '" + out_file + "'");
    std::cout << out_file << "\n";
}

// ---------------------------------------------------------------- scenes

void cmd_scenes() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(scene_dir()))
        if (e.path().extension() == ".yaml") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const auto all = load_scenarios(f.string());
        std::string variants;
        for (const auto& s : all)
            if (!s.variant.empty()) variants += (variants.empty() ? "" : ",") + s.variant;
        std::cout << all.front().name << "  [" << (variants.empty() ? "-" : variants) << "]  "
                  << all.front().description << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wgsim: gravitational and whispering-gallery quantum states of slow particles"};
    app.require_subcommand(1);

    DesignArgs da;
    auto* design = app.add_subcommand("design", "order-of-magnitude design chain");
    design->add_option("--particle", da.particle, "particle name from the catalog")->required();
    design->add_option("--mode", da.mode, "wgs | mu | reduced")->capture_default_str();
    design->add_option("--beta", da.beta, "bounces per observation (default 10, reduced mode 3)");
    design->add_option("--gamma", da.gamma, "E_lim / E_WGS")->capture_default_str();
    design->add_option("--L", da.L, "mirror length, m");
    design->add_option("--v", da.v, "longitudinal velocity, m/s");
    design->add_option("--R", da.R, "mirror radius, m");
    design->add_option("--a", da.a, "centrifugal acceleration (mu mode), m/s^2");
    design->add_option("--t-cap", da.t_cap, "observation time cap, s");
    design->add_option("--E-lim-eV", da.E_lim_eV, "critical energy, overrides the QR model");
    design->add_option("--qr-table", da.table, "reflection table (E_perp eV, P)");
    design->add_option("--b", da.b, "imaginary scattering length |Im a|, m");
    design->add_option("--g", da.g, "gravity, m/s^2")->capture_default_str();
    design->add_option("--lifetimes", da.lifetimes, "mu mode: observation time in lifetimes")->capture_default_str();
    design->add_option("--excited", da.excited, "mu mode: N in dH = (3+N) l")->capture_default_str();
    design->add_option("--passes", da.passes, "reduced mode: passes across the box")->capture_default_str();
    design->add_option("--box", da.box, "reduced mode: box width, m")->capture_default_str();
    design->add_option("--delta", da.delta, "collimation margin in the acceptance")->capture_default_str();

    std::string scene, variant, orientation, out;
    std::vector<std::string> sets;
    auto scene_opts = [&](CLI::App* c) {
        c->add_option("scene", scene, "scene file or shipped scene name")->required();
        c->add_option("--variant", variant, "run only this variant");
        c->add_option("--set", sets, "override a scene key, e.g. mirror.length_m=0.5");
        c->add_option("--out", out, "output directory (default $WGSIM_OUTPUT_DIR or .)");
    };
    auto* sim = app.add_subcommand("simulate", "run a scene and write its CSV outputs");
    scene_opts(sim);
    sim->add_option("--orientation", orientation, "curved mirror facing up | down")
        ->check(CLI::IsMember({"up", "down"}));

    std::optional<double> events, step;
    auto* sens = app.add_subcommand("sensitivity", "Fisher information and Cramer-Rao bound of a scene");
    scene_opts(sens);
    sens->add_option("--events", events, "number of detected events N");
    sens->add_option("--step-rel", step, "finite-difference step relative to the parameter");

    std::vector<std::string> vary;
    bool zip = false;
    std::string sweep_out = "sweep.csv";
    auto* sweep = app.add_subcommand("sweep", "run a scene over parameter values");
    sweep->add_option("scene", scene, "scene file or shipped scene name")->required();
    sweep->add_option("--variant", variant, "variant to sweep");
    sweep->add_option("--set", sets, "fixed override");
    sweep->add_option("--vary", vary, "key=v1,v2,... or key=start:stop:count")->required();
    sweep->add_flag("--zip", zip, "pair the value lists instead of taking their product");
    sweep->add_option("-o,--output", sweep_out, "result CSV; <file>.journal holds finished rows")
        ->capture_default_str();

    auto* scenes = app.add_subcommand("scenes", "list shipped scenes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*design) cmd_design(da);
        if (*sim) cmd_simulate(scene, sets, orientation, variant, out);
        if (*sens) cmd_sensitivity(scene, sets, variant, events, step, out);
        if (*sweep) cmd_sweep(scene, sets, variant, vary, zip, sweep_out);
        if (*scenes) cmd_scenes();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const YAML::Exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::io);
    }
    return 0;
}
