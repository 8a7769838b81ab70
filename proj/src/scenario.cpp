#include "wgsim/scenario.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wgsim/errors.hpp"
#include "wgsim/particle.hpp"
#include "wgsim/units.hpp"

namespace wgsim {

namespace {

// Reads one mapping node, remembering which keys were consumed so leftovers can be
// reported as unknown fields.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ValidationError(path_ + ": expected a mapping");
    }

    bool has(const std::string& key) const { return node_ && node_[key]; }

    Section child(const std::string& key) {
        used_.insert(key);
        return Section(node_ ? node_[key] : YAML::Node(), where(key));
    }

    std::optional<std::string> text(const std::string& key) {
        if (!has(key)) return std::nullopt;
        used_.insert(key);
        return scalar<std::string>(node_[key], key);
    }

    std::optional<bool> flag(const std::string& key) {
        if (!has(key)) return std::nullopt;
        used_.insert(key);
        return scalar<bool>(node_[key], key);
    }

    std::optional<double> number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        used_.insert(key);
        return scalar<double>(node_[key], key);
    }

    // Looks for base_<unit> among the keys and converts to SI.
    std::optional<double> quantity(const std::string& base, const Dimension& dim) {
        auto k = find_key(base, dim);
        if (!k) return std::nullopt;
        return scalar<double>(node_[k->first], k->first) * k->second;
    }

    std::optional<std::vector<double>> quantity_list(const std::string& base, const Dimension& dim) {
        auto k = find_key(base, dim);
        if (!k) return std::nullopt;
        const auto n = node_[k->first];
        std::vector<double> out;
        if (n.IsSequence()) {
            for (std::size_t i = 0; i < n.size(); ++i)
                out.push_back(scalar<double>(n[i], k->first + "[" + std::to_string(i) + "]") * k->second);
        } else {
            out.push_back(scalar<double>(n, k->first) * k->second);
        }
        return out;
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (!used_.count(key)) throw ValidationError(where(key) + ": unknown field");
        }
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    template <class T>
    T scalar(const YAML::Node& n, const std::string& key) const {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ValidationError(where(key) + ": cannot read value");
        }
    }

    std::optional<std::pair<std::string, double>> find_key(const std::string& base, const Dimension& dim) {
        if (!node_ || !node_.IsMap()) return std::nullopt;
        std::optional<std::pair<std::string, double>> found;
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (key.size() <= base.size() + 1 || key.compare(0, base.size() + 1, base + "_") != 0) continue;
            UnitSuffix u;
            try {
                u = parse_unit_suffix(key.substr(base.size() + 1));
            } catch (const ValidationError&) {
                continue;  // another field sharing the prefix, or a typo reported by finish()
            }
            if (!(u.dim == dim))
                throw ValidationError(where(key) + ": unit has dimension " + u.dim.symbol() + ", expected " +
                                      dim.symbol());
            if (found) throw ValidationError(where(key) + ": given twice (also " + found->first + ")");
            found = std::make_pair(key, u.scale);
            used_.insert(key);
        }
        return found;
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
};

// Electric fields are the one quantity outside the mechanical unit table.
std::optional<double> field_quantity(Section& s, const std::string& base) {
    static const std::map<std::string, double> units = {{"V_m", 1.0}, {"V_cm", 100.0}, {"kV_cm", 1e5}};
    std::optional<double> out;
    for (const auto& [suffix, scale] : units)
        if (auto v = s.number(base + "_" + suffix)) {
            if (out) throw ValidationError(s.where(base) + ": given twice");
            out = *v * scale;
        }
    return out;
}

// "extra_m_s2" -> "extra"; empty when the key carries no unit suffix.
std::string quantity_base(const std::string& key) {
    for (auto pos = key.find('_'); pos != std::string::npos; pos = key.find('_', pos + 1)) {
        const auto suffix = key.substr(pos + 1);
        if (suffix == "V_m" || suffix == "V_cm" || suffix == "kV_cm") return key.substr(0, pos);
        try {
            parse_unit_suffix(suffix);
            return key.substr(0, pos);
        } catch (const ValidationError&) {
        }
    }
    return {};
}

// Assigning a quantity in one unit replaces it in any other unit.
void set_path(YAML::Node root, const std::string& dotted, const YAML::Node& value) {
    std::vector<std::string> parts;
    std::stringstream ss(dotted);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    if (parts.empty()) throw ValidationError("empty override path");
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (!next || next.IsNull()) {
            chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
            next = chain.back()[parts[i]];
        }
        if (!next.IsMap()) throw ValidationError(dotted + ": '" + parts[i] + "' is not a section");
        chain.push_back(next);
    }
    // an explicit velocity list and a velocity range exclude each other
    const auto& leaf = parts.back();
    const bool list = quantity_base(leaf) == "velocities";
    const bool range = leaf == "v_count" || quantity_base(leaf) == "v_min" || quantity_base(leaf) == "v_max";
    if (list || range) {
        std::vector<std::string> other;
        for (auto it = chain.back().begin(); it != chain.back().end(); ++it) {
            const auto key = it->first.as<std::string>();
            const auto b = quantity_base(key);
            if (list ? (key == "v_count" || b == "v_min" || b == "v_max") : b == "velocities") other.push_back(key);
        }
        for (const auto& key : other) chain.back().remove(key);
    }
    if (const auto base = quantity_base(parts.back()); !base.empty()) {
        std::vector<std::string> stale;
        for (auto it = chain.back().begin(); it != chain.back().end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (key != parts.back() && quantity_base(key) == base) stale.push_back(key);
        }
        for (const auto& key : stale) chain.back().remove(key);
    }
    chain.back()[parts.back()] = value;
}

Scenario build(const YAML::Node& doc, const std::string& origin, const std::string& variant) {
    Section top(doc, "");
    Scenario s;
    s.variant = variant;
    s.name = top.text("name").value_or("");
    if (s.name.empty()) throw ValidationError(origin + ": name: required");
    s.description = top.text("description").value_or("");
    s.particle = top.text("particle").value_or("");
    if (!default_catalog().contains(s.particle))
        throw ValidationError(origin + ": particle: unknown species '" + s.particle + "'");
    s.seed = static_cast<long>(top.number("seed").value_or(0));

    const auto L = Dimension::length();
    const auto T = Dimension::time();
    const auto V = Dimension::velocity();
    const auto A = Dimension::acceleration();
    const auto need = [&](std::optional<double> v, const std::string& path) {
        if (!v) throw ValidationError(origin + ": " + path + ": required");
        return *v;
    };

    {
        auto m = top.child("mirror");
        s.mirror.length = need(m.quantity("length", L), "mirror.length_<unit>");
        if (m.has("radius_m") && m.text("radius_m") == std::string("flat")) {
            s.mirror.radius.reset();
        } else {
            s.mirror.radius = m.quantity("radius", L);
        }
        const auto orient = m.text("orientation").value_or("up");
        if (orient != "up" && orient != "down")
            throw ValidationError(origin + ": mirror.orientation: expected up or down");
        s.mirror.facing_down = orient == "down";
        const auto wall = m.text("wall").value_or("hard");
        if (wall == "hard") {
            s.mirror.wall = WallKind::hard;
        } else if (wall == "scattering_length") {
            s.mirror.wall = WallKind::scattering_length;
            const double re = m.quantity("wall_length_re", L).value_or(0.0);
            const double im = need(m.quantity("wall_length_im", L), "mirror.wall_length_im_<unit>");
            if (im > 0) throw ValidationError(origin + ": mirror.wall_length_im: must be <= 0");
            s.mirror.wall_length = {re, im};
        } else {
            throw ValidationError(origin + ": mirror.wall: expected hard or scattering_length");
        }
        m.finish();
    }
    {
        auto a = top.child("absorber");
        s.absorber.length = a.quantity("length", L).value_or(0.0);
        s.absorber.height = need(a.quantity("height", L), "absorber.height_<unit>");
        s.absorber.widths = a.flag("widths").value_or(true);
        a.finish();
    }
    {
        auto a = top.child("accelerations");
        s.accel.gravity = a.flag("gravity").value_or(true);
        s.accel.g = a.quantity("g", A).value_or(constants::standard_gravity);
        s.accel.extra = a.quantity("extra", A).value_or(0.0);
        s.accel.gravity_in_flight = a.flag("gravity_in_flight").value_or(true);
        a.finish();
    }
    {
        auto b = top.child("beam");
        if (auto list = b.quantity_list("velocities", V)) {
            s.beam.velocities = *list;
        } else {
            const double lo = need(b.quantity("v_min", V), "beam.velocities or beam.v_min");
            const double hi = need(b.quantity("v_max", V), "beam.v_max");
            const auto n = static_cast<std::size_t>(need(b.number("v_count"), "beam.v_count"));
            if (n < 1 || hi < lo) throw ValidationError(origin + ": beam: need v_count >= 1 and v_max >= v_min");
            for (std::size_t i = 0; i < n; ++i)
                s.beam.velocities.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
        }
        for (double v : s.beam.velocities)
            if (!(v > 0)) throw ValidationError(origin + ": beam.velocities: must be > 0");
        const auto spec = b.text("spectrum").value_or("flat");
        if (spec == "flat") {
            s.beam.spectrum = Spectrum::flat;
        } else if (spec == "gaussian") {
            s.beam.spectrum = Spectrum::gaussian;
            s.beam.mean = need(b.quantity("spectrum_mean", V), "beam.spectrum_mean_<unit>");
            s.beam.sigma = need(b.quantity("spectrum_sigma", V), "beam.spectrum_sigma_<unit>");
            if (!(s.beam.sigma > 0)) throw ValidationError(origin + ": beam.spectrum_sigma: must be > 0");
        } else {
            throw ValidationError(origin + ": beam.spectrum: expected flat or gaussian");
        }
        s.beam.k_perp = b.quantity("k_perp", Dimension::length() / Dimension::length() / Dimension::length())
                            .value_or(0.0);
        b.finish();
    }
    {
        auto d = top.child("detector");
        s.detector.D = need(d.quantity("distance", L), "detector.distance_<unit>");
        s.detector.tof_length = d.quantity("tof_length", L).value_or(0.0);
        s.detector.res_x = d.quantity("resolution_x", L).value_or(0.0);
        s.detector.res_t = d.quantity("resolution_t", T).value_or(0.0);
        s.detector.res_v = d.quantity("resolution_v", V).value_or(0.0);
        s.detector.x_min = d.quantity("x_min", L);
        s.detector.x_max = d.quantity("x_max", L);
        if (auto n = d.number("n_x")) s.detector.n_x = static_cast<std::size_t>(*n);
        s.detector.force_far_field = d.flag("force_far_field").value_or(false);
        d.finish();
        if (s.detector.res_t > 0 && !(s.detector.tof_length > 0))
            throw ValidationError(origin + ": detector.tof_length: required with resolution_t");
        if (s.detector.x_min.has_value() != s.detector.x_max.has_value())
            throw ValidationError(origin + ": detector.x_min/x_max: give both or neither");
    }
    {
        auto o = top.child("outputs");
        s.outputs.pattern = o.flag("pattern").value_or(true);
        s.outputs.current = o.flag("current").value_or(false);
        s.outputs.z_min = o.quantity("z_min", L);
        s.outputs.z_max = o.quantity("z_max", L);
        if (auto n = o.number("n_z")) s.outputs.n_z = static_cast<std::size_t>(*n);
        auto sn = o.child("sensitivity");
        s.outputs.sensitivity = o.has("sensitivity");
        if (s.outputs.sensitivity) {
            const auto p = sn.text("parameter").value_or("g");
            if (p == "g")
                s.outputs.parameter = SensitivityParameter::g;
            else if (p == "extra")
                s.outputs.parameter = SensitivityParameter::extra;
            else if (p == "charge")
                s.outputs.parameter = SensitivityParameter::charge;
            else
                throw ValidationError(origin + ": outputs.sensitivity.parameter: expected g, extra or charge");
            s.outputs.events = need(sn.number("events"), "outputs.sensitivity.events");
            s.outputs.step_rel = sn.number("step_rel").value_or(1e-4);
            s.outputs.field = field_quantity(sn, "field").value_or(0.0);
            if (s.outputs.parameter == SensitivityParameter::charge && !(s.outputs.field > 0))
                throw ValidationError(origin + ": outputs.sensitivity.field_<unit>: required for charge");
        }
        sn.finish();
        o.finish();
    }
    {
        auto n = top.child("numerics");
        s.numerics.points_per_l = n.number("points_per_l").value_or(80.0);
        s.numerics.basis_height_factor = n.number("basis_height_factor").value_or(2.0);
        s.numerics.pad = static_cast<int>(n.number("pad").value_or(2));
        s.numerics.samples_per_fringe = n.number("samples_per_fringe").value_or(8.0);
        s.numerics.ignore_lifetime = n.flag("ignore_lifetime").value_or(false);
        s.numerics.lossless = n.flag("lossless").value_or(false);
        n.finish();
    }
    top.child("variants");  // consumed by the caller
    top.finish();

    if (!(s.mirror.length > 0)) throw ValidationError(origin + ": mirror.length: must be > 0");
    if (s.mirror.radius && !(*s.mirror.radius > 0)) throw ValidationError(origin + ": mirror.radius: must be > 0");
    if (!(s.absorber.height > 0)) throw ValidationError(origin + ": absorber.height: must be > 0");
    if (s.absorber.length < 0 || s.absorber.length > s.mirror.length)
        throw ValidationError(origin + ": absorber.length: must lie within the mirror length");
    if (!(s.detector.D > 0)) throw ValidationError(origin + ": detector.distance: must be > 0");
    if (s.numerics.points_per_l < 8) throw ValidationError(origin + ": numerics.points_per_l: must be >= 8");
    if (s.numerics.basis_height_factor < 1)
        throw ValidationError(origin + ": numerics.basis_height_factor: must be >= 1");
    if (s.numerics.pad < 1) throw ValidationError(origin + ": numerics.pad: must be >= 1");
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + s + "': expected key=value");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& origin,
                                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    if (!doc.IsMap()) throw ValidationError(origin + ": expected a mapping at the top level");
    for (const auto& [k, v] : overrides) set_path(doc, k, YAML::Load(v));

    std::vector<Scenario> out;
    const auto variants = doc["variants"];
    if (!variants) {
        out.push_back(build(doc, origin, ""));
        return out;
    }
    if (!variants.IsMap()) throw ValidationError(origin + ": variants: expected a mapping of name -> overrides");
    for (auto it = variants.begin(); it != variants.end(); ++it) {
        const auto vname = it->first.as<std::string>();
        YAML::Node copy = YAML::Clone(doc);
        copy.remove("variants");
        if (it->second.IsMap())
            for (auto kv = it->second.begin(); kv != it->second.end(); ++kv)
                set_path(copy, kv->first.as<std::string>(), kv->second);
        // command-line overrides win over variant settings
        for (const auto& [k, v] : overrides) set_path(copy, k, YAML::Load(v));
        out.push_back(build(copy, origin + " [" + vname + "]", vname));
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path,
                                     const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scene file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenarios(ss.str(), path, overrides);
}

std::string canonical(const Scenario& s) {
    std::ostringstream o;
    auto line = [&](const std::string& k, const std::string& v) { o << k << '=' << v << '\n'; };
    auto num = [&](const std::string& k, double v) { line(k, fmt(v)); };
    line("name", s.name);
    line("variant", s.variant);
    line("particle", s.particle);
    line("seed", std::to_string(s.seed));
    num("mirror.length", s.mirror.length);
    line("mirror.radius", s.mirror.radius ? fmt(*s.mirror.radius) : "flat");
    line("mirror.orientation", s.mirror.facing_down ? "down" : "up");
    line("mirror.wall", s.mirror.wall == WallKind::hard ? "hard" : "scattering_length");
    num("mirror.wall_length_re", s.mirror.wall_length.real());
    num("mirror.wall_length_im", s.mirror.wall_length.imag());
    num("absorber.length", s.absorber.length);
    num("absorber.height", s.absorber.height);
    line("absorber.widths", s.absorber.widths ? "true" : "false");
    line("accel.gravity", s.accel.gravity ? "true" : "false");
    num("accel.g", s.accel.g);
    num("accel.extra", s.accel.extra);
    line("accel.gravity_in_flight", s.accel.gravity_in_flight ? "true" : "false");
    std::string vs;
    for (double v : s.beam.velocities) vs += (vs.empty() ? "" : ",") + fmt(v);
    line("beam.velocities", vs);
    line("beam.spectrum", s.beam.spectrum == Spectrum::flat ? "flat" : "gaussian");
    num("beam.mean", s.beam.mean);
    num("beam.sigma", s.beam.sigma);
    num("beam.k_perp", s.beam.k_perp);
    num("detector.D", s.detector.D);
    num("detector.tof_length", s.detector.tof_length);
    num("detector.res_x", s.detector.res_x);
    num("detector.res_t", s.detector.res_t);
    num("detector.res_v", s.detector.res_v);
    line("detector.x_min", s.detector.x_min ? fmt(*s.detector.x_min) : "auto");
    line("detector.x_max", s.detector.x_max ? fmt(*s.detector.x_max) : "auto");
    line("detector.n_x", s.detector.n_x ? std::to_string(*s.detector.n_x) : "auto");
    line("detector.force_far_field", s.detector.force_far_field ? "true" : "false");
    line("outputs.pattern", s.outputs.pattern ? "true" : "false");
    line("outputs.current", s.outputs.current ? "true" : "false");
    line("outputs.z_min", s.outputs.z_min ? fmt(*s.outputs.z_min) : "auto");
    line("outputs.z_max", s.outputs.z_max ? fmt(*s.outputs.z_max) : "auto");
    line("outputs.n_z", s.outputs.n_z ? std::to_string(*s.outputs.n_z) : "auto");
    line("outputs.sensitivity", s.outputs.sensitivity ? "true" : "false");
    if (s.outputs.sensitivity) {
        static const char* names[] = {"g", "extra", "charge"};
        line("outputs.sensitivity.parameter", names[static_cast<int>(s.outputs.parameter)]);
        num("outputs.sensitivity.events", s.outputs.events);
        num("outputs.sensitivity.step_rel", s.outputs.step_rel);
        num("outputs.sensitivity.field", s.outputs.field);
    }
    num("numerics.points_per_l", s.numerics.points_per_l);
    num("numerics.basis_height_factor", s.numerics.basis_height_factor);
    line("numerics.pad", std::to_string(s.numerics.pad));
    num("numerics.samples_per_fringe", s.numerics.samples_per_fringe);
    line("numerics.ignore_lifetime", s.numerics.ignore_lifetime ? "true" : "false");
    line("numerics.lossless", s.numerics.lossless ? "true" : "false");
    return o.str();
}

std::string scene_hash(const Scenario& s) {
    const auto text = canonical(s);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ExitCode::numerical, "scene_hash: SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace wgsim
