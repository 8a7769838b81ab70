#include "wgsim/particle.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

namespace c = constants;

ParticleCatalog ParticleCatalog::builtin() {
    const double inf = std::numeric_limits<double>::infinity();
    const double m_H = c::hydrogen_mass_u * c::atomic_mass_unit;
    const double m_Ps = 2.0 * c::electron_mass;
    ParticleCatalog cat;
    cat.add({"n", c::neutron_mass, 878.4, false});
    cat.add({"H", m_H, inf, false});
    cat.add({"Hbar", m_H, inf, true});
    cat.add({"Mu", c::muon_mass + c::electron_mass, 2.1969811e-6, false});
    cat.add({"Ps1S", m_Ps, 1.42e-7, true});
    cat.add({"Ps2S", m_Ps, 1.136e-6, true});
    cat.add({"Ps33", m_Ps, 1.0e-5, true});
    return cat;
}

static ParticleCatalog parse_catalog(const YAML::Node& root, const std::string& origin) {
    if (!root.IsMap()) throw ValidationError(origin + ": particle catalog must be a mapping");
    ParticleCatalog cat;
    for (const auto& kv : root) {
        const auto name = kv.first.as<std::string>();
        const auto& node = kv.second;
        const std::string where = origin + ": " + name;
        if (!node.IsMap() || !node["mass_kg"])
            throw ValidationError(where + ": needs mass_kg");
        ParticleSpec p;
        p.name = name;
        try {
            p.mass = node["mass_kg"].as<double>();
            if (node["lifetime_s"]) {
                const auto s = node["lifetime_s"].as<std::string>();
                p.lifetime = (s == "inf" || s == ".inf") ? std::numeric_limits<double>::infinity()
                                                         : node["lifetime_s"].as<double>();
            }
            if (node["annihilates"]) p.annihilates = node["annihilates"].as<bool>();
        } catch (const YAML::Exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (!(p.mass > 0.0) || !std::isfinite(p.mass))
            throw ValidationError(where + ": mass_kg must be positive");
        if (!(p.lifetime > 0.0)) throw ValidationError(where + ": lifetime_s must be positive");
        cat.add(p);
    }
    return cat;
}

ParticleCatalog ParticleCatalog::from_yaml_text(const std::string& text) {
    try {
        return parse_catalog(YAML::Load(text), "<text>");
    } catch (const YAML::Exception& e) {
        throw ValidationError(std::string("particle catalog: ") + e.what());
    }
}

ParticleCatalog ParticleCatalog::from_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open particle catalog " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_catalog(YAML::Load(ss.str()), path);
    } catch (const YAML::Exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void ParticleCatalog::merge(const ParticleCatalog& other) {
    for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

void ParticleCatalog::add(const ParticleSpec& p) { entries_[p.name] = p; }

const ParticleSpec& ParticleCatalog::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        std::string known;
        for (const auto& [k, v] : entries_) known += (known.empty() ? "" : ", ") + k;
        throw ValidationError("unknown particle '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

std::vector<std::string> ParticleCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

const ParticleCatalog& default_catalog() {
    static const ParticleCatalog cat = [] {
        auto base = ParticleCatalog::builtin();
        if (const char* path = std::getenv("WGSIM_PARTICLES"); path && *path)
            base.merge(ParticleCatalog::from_yaml_file(path));
        return base;
    }();
    return cat;
}

}  // namespace wgsim
