#pragma once

#include <array>
#include <string>

namespace wgsim {

// Exponents over (length, time, mass, angle). Angle is tracked separately so that
// radians never silently mix with plain ratios.
struct Dimension {
    std::array<int, 4> exp{0, 0, 0, 0};

    static Dimension dimensionless() { return {}; }
    static Dimension length() { return {{1, 0, 0, 0}}; }
    static Dimension time() { return {{0, 1, 0, 0}}; }
    static Dimension mass() { return {{0, 0, 1, 0}}; }
    static Dimension energy() { return {{2, -2, 1, 0}}; }
    static Dimension velocity() { return {{1, -1, 0, 0}}; }
    static Dimension acceleration() { return {{1, -2, 0, 0}}; }
    static Dimension angle() { return {{0, 0, 0, 1}}; }
    static Dimension frequency() { return {{0, -1, 0, 0}}; }

    friend bool operator==(const Dimension&, const Dimension&) = default;
    Dimension operator*(const Dimension& o) const;
    Dimension operator/(const Dimension& o) const;

    // "m/s^2", "J", "1" and so on; falls back to an exponent string.
    std::string symbol() const;
};

// A magnitude in SI base units with a runtime dimension tag.
class UnitValue {
public:
    UnitValue() = default;
    UnitValue(double si, Dimension dim) : v_(si), dim_(dim) {}

    double si() const { return v_; }
    const Dimension& dimension() const { return dim_; }

    // Returns the SI magnitude after checking the dimension.
    double as(const Dimension& expected) const;

    UnitValue operator+(const UnitValue& o) const;
    UnitValue operator-(const UnitValue& o) const;
    UnitValue operator*(const UnitValue& o) const { return {v_ * o.v_, dim_ * o.dim_}; }
    UnitValue operator/(const UnitValue& o) const { return {v_ / o.v_, dim_ / o.dim_}; }
    UnitValue operator*(double s) const { return {v_ * s, dim_}; }

    // Energies print in eV, everything else in SI.
    std::string display() const;

    static UnitValue from_eV(double ev);
    double to_eV() const;

private:
    double v_ = 0.0;
    Dimension dim_{};
};

// Parses a unit suffix used in scenario keys ("m", "um", "mm", "s", "ms", "eV",
// "m_s", "m_s2", "rad", "mrad", "kg"). Returns the SI scale and dimension.
struct UnitSuffix {
    double scale;
    Dimension dim;
};
UnitSuffix parse_unit_suffix(const std::string& suffix);

}  // namespace wgsim
