#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace wgsim {

struct ParticleSpec {
    std::string name;
    double mass = 0.0;                                          // kg
    double lifetime = std::numeric_limits<double>::infinity();  // s
    bool annihilates = false;

    bool decays() const { return lifetime < std::numeric_limits<double>::infinity(); }
};

// Name-keyed particle table. The built-in defaults can be overridden or extended
// from a YAML file of the form
//   Ps33: {mass_kg: 1.8218e-30, lifetime_s: 1.0e-5, annihilates: true}
// where lifetime_s may be the string "inf".
class ParticleCatalog {
public:
    static ParticleCatalog builtin();
    static ParticleCatalog from_yaml_file(const std::string& path);
    static ParticleCatalog from_yaml_text(const std::string& text);

    // Entries from `other` replace entries with the same name.
    void merge(const ParticleCatalog& other);
    void add(const ParticleSpec& p);

    const ParticleSpec& get(const std::string& name) const;
    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, ParticleSpec> entries_;
};

// Built-in catalog, optionally merged with the file named by WGSIM_PARTICLES.
const ParticleCatalog& default_catalog();

}  // namespace wgsim
