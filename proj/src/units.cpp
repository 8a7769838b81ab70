#include "wgsim/units.hpp"

#include <cstdio>
#include <map>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

Dimension Dimension::operator*(const Dimension& o) const {
    Dimension d;
    for (int i = 0; i < 4; ++i) d.exp[i] = exp[i] + o.exp[i];
    return d;
}

Dimension Dimension::operator/(const Dimension& o) const {
    Dimension d;
    for (int i = 0; i < 4; ++i) d.exp[i] = exp[i] - o.exp[i];
    return d;
}

std::string Dimension::symbol() const {
    static const std::pair<Dimension, const char*> named[] = {
        {dimensionless(), "1"},  {length(), "m"},        {time(), "s"},
        {mass(), "kg"},          {energy(), "J"},        {velocity(), "m/s"},
        {acceleration(), "m/s^2"}, {angle(), "rad"},     {frequency(), "1/s"},
    };
    for (const auto& [d, s] : named)
        if (d == *this) return s;
    static const char* base[] = {"m", "s", "kg", "rad"};
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (exp[i] == 0) continue;
        if (!out.empty()) out += ' ';
        out += base[i];
        if (exp[i] != 1) out += '^' + std::to_string(exp[i]);
    }
    return out;
}

double UnitValue::as(const Dimension& expected) const {
    if (!(dim_ == expected))
        throw ValidationError("dimension mismatch: have " + dim_.symbol() + ", expected " +
                              expected.symbol());
    return v_;
}

UnitValue UnitValue::operator+(const UnitValue& o) const {
    if (!(dim_ == o.dim_))
        throw ValidationError("cannot add " + dim_.symbol() + " and " + o.dim_.symbol());
    return {v_ + o.v_, dim_};
}

UnitValue UnitValue::operator-(const UnitValue& o) const {
    if (!(dim_ == o.dim_))
        throw ValidationError("cannot subtract " + o.dim_.symbol() + " from " + dim_.symbol());
    return {v_ - o.v_, dim_};
}

UnitValue UnitValue::from_eV(double ev) { return {ev * constants::eV, Dimension::energy()}; }

double UnitValue::to_eV() const { return as(Dimension::energy()) / constants::eV; }

std::string UnitValue::display() const {
    char buf[64];
    if (dim_ == Dimension::energy())
        std::snprintf(buf, sizeof buf, "%.6g eV", v_ / constants::eV);
    else
        std::snprintf(buf, sizeof buf, "%.6g %s", v_, dim_.symbol().c_str());
    return buf;
}

UnitSuffix parse_unit_suffix(const std::string& suffix) {
    static const std::map<std::string, UnitSuffix> table = {
        {"m", {1.0, Dimension::length()}},
        {"cm", {1e-2, Dimension::length()}},
        {"mm", {1e-3, Dimension::length()}},
        {"um", {1e-6, Dimension::length()}},
        {"nm", {1e-9, Dimension::length()}},
        {"s", {1.0, Dimension::time()}},
        {"ms", {1e-3, Dimension::time()}},
        {"us", {1e-6, Dimension::time()}},
        {"kg", {1.0, Dimension::mass()}},
        {"J", {1.0, Dimension::energy()}},
        {"eV", {constants::eV, Dimension::energy()}},
        {"m_s", {1.0, Dimension::velocity()}},
        {"m_s2", {1.0, Dimension::acceleration()}},
        {"g", {constants::standard_gravity, Dimension::acceleration()}},
        {"rad", {1.0, Dimension::angle()}},
        {"mrad", {1e-3, Dimension::angle()}},
        {"1_m", {1.0, Dimension::length() / Dimension::length() / Dimension::length()}},
    };
    auto it = table.find(suffix);
    if (it == table.end()) throw ValidationError("unknown unit suffix '" + suffix + "'");
    return it->second;
}

}  // namespace wgsim
