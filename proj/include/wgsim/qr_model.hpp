#pragma once

#include <complex>
#include <string>
#include <vector>

namespace wgsim {

enum class QRMode { hard_wall, scattering_length, tabulated };

struct QRTablePoint {
    double E;  // J
    double P;  // reflection probability
};

// Reflection of a slow particle from a surface.
//
// scattering_length: r(k) = -exp(-2 i k a) with a = a_r - i b, b >= 0, so
// P = exp(-4 k b) and P ~ 1 - 4 k b near threshold. The sign convention
// Im(a) <= 0 is enforced at construction.
//
// tabulated: P(E) from a table, linear in (sqrt(E), ln P); the point (0, 1)
// is implied below the first row.
class QRModel {
public:
    static QRModel hard_wall(double critical_energy, std::string material = "ideal");
    static QRModel scattering_length(std::complex<double> a, std::string material = "");
    static QRModel tabulated(std::vector<QRTablePoint> table, std::string material = "");

    // Two-column text: E_perp [eV], P. '#' starts a comment line.
    static QRModel load_table(const std::string& path, std::string material = "");
    static QRModel parse_table(const std::string& text, const std::string& origin,
                               std::string material = "");

    QRMode mode() const { return mode_; }
    const std::string& material() const { return material_; }
    double critical_energy() const { return critical_energy_; }
    std::complex<double> length() const { return a_; }
    const std::vector<QRTablePoint>& table() const { return table_; }

private:
    QRMode mode_ = QRMode::hard_wall;
    std::string material_;
    double critical_energy_ = 0.0;
    std::complex<double> a_{0.0, 0.0};
    std::vector<QRTablePoint> table_;
};

// P(E_perp) for a particle of the given mass. Energies above the table range
// raise ValidationError unless clamp is set, in which case the last row is used.
double reflection_probability(const QRModel& model, double E_perp, double mass, bool clamp = false);

// Survival after beta bounces, P^beta.
double survival(const QRModel& model, double E_perp, double mass, double beta, bool clamp = false);

// E_lim solving P(E_lim)^beta = 1/2, to 1e-6 relative.
double effective_critical_energy(const QRModel& model, double beta, double mass);

}  // namespace wgsim
