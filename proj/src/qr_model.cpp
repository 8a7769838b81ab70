#include "wgsim/qr_model.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"

namespace wgsim {

using constants::hbar;

QRModel QRModel::hard_wall(double critical_energy, std::string material) {
    if (!(critical_energy > 0.0)) throw ValidationError("hard_wall: critical energy must be > 0");
    QRModel m;
    m.mode_ = QRMode::hard_wall;
    m.critical_energy_ = critical_energy;
    m.material_ = std::move(material);
    return m;
}

QRModel QRModel::scattering_length(std::complex<double> a, std::string material) {
    if (a.imag() > 0.0)
        throw ValidationError("scattering_length: Im(a) must be <= 0 (a = a_r - i b)");
    QRModel m;
    m.mode_ = QRMode::scattering_length;
    m.a_ = a;
    m.material_ = std::move(material);
    return m;
}

QRModel QRModel::tabulated(std::vector<QRTablePoint> table, std::string material) {
    if (table.empty()) throw ValidationError("tabulated QR model: empty table");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& p = table[i];
        if (!(p.E > 0.0)) throw ValidationError("tabulated QR model: energies must be > 0");
        if (!(p.P > 0.0 && p.P <= 1.0))
            throw ValidationError("tabulated QR model: P must lie in (0, 1]");
        if (i > 0 && !(p.E > table[i - 1].E))
            throw ValidationError("tabulated QR model: energies must increase strictly");
    }
    QRModel m;
    m.mode_ = QRMode::tabulated;
    m.table_ = std::move(table);
    m.material_ = std::move(material);
    return m;
}

QRModel QRModel::parse_table(const std::string& text, const std::string& origin,
                             std::string material) {
    std::istringstream in(text);
    std::string line;
    std::vector<QRTablePoint> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double e_ev, p;
        std::string extra;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (!(ls >> e_ev >> p)) throw ValidationError(where + "expected two numbers");
        if (ls >> extra) throw ValidationError(where + "trailing text '" + extra + "'");
        if (!(e_ev > 0.0)) throw ValidationError(where + "energy must be > 0");
        if (!(p > 0.0 && p <= 1.0)) throw ValidationError(where + "P must lie in (0, 1]");
        if (!rows.empty() && !(e_ev * constants::eV > rows.back().E))
            throw ValidationError(where + "energies must increase strictly");
        rows.push_back({e_ev * constants::eV, p});
    }
    if (rows.empty()) throw ValidationError(origin + ": no data rows");
    return tabulated(std::move(rows), std::move(material));
}

QRModel QRModel::load_table(const std::string& path, std::string material) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open QR table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_table(ss.str(), path, std::move(material));
}

static double table_lookup(const std::vector<QRTablePoint>& t, double E, bool clamp) {
    if (E > t.back().E) {
        if (!clamp)
            throw ValidationError("reflection_probability: E beyond table range (extrapolation "
                                  "refused; pass clamp to use the last row)");
        return t.back().P;
    }
    double s0 = 0.0, lp0 = 0.0;  // implied (0, 1)
    const double s = std::sqrt(E);
    for (const auto& row : t) {
        const double s1 = std::sqrt(row.E), lp1 = std::log(row.P);
        if (s <= s1) {
            const double w = (s - s0) / (s1 - s0);
            return std::exp(lp0 + w * (lp1 - lp0));
        }
        s0 = s1;
        lp0 = lp1;
    }
    return t.back().P;
}

double reflection_probability(const QRModel& model, double E, double mass, bool clamp) {
    if (!(E >= 0.0)) throw ValidationError("reflection_probability: E_perp must be >= 0");
    switch (model.mode()) {
        case QRMode::hard_wall:
            return E <= model.critical_energy() ? 1.0 : 0.0;
        case QRMode::scattering_length: {
            if (!(mass > 0.0)) throw ValidationError("reflection_probability: mass must be > 0");
            const double k = std::sqrt(2.0 * mass * E) / hbar;
            const std::complex<double> r = -std::exp(std::complex<double>(0.0, -2.0 * k) * model.length());
            return std::min(1.0, std::norm(r));
        }
        case QRMode::tabulated:
            return table_lookup(model.table(), E, clamp);
    }
    return 0.0;
}

double survival(const QRModel& model, double E, double mass, double beta, bool clamp) {
    return std::pow(reflection_probability(model, E, mass, clamp), beta);
}

double effective_critical_energy(const QRModel& model, double beta, double mass) {
    if (!(beta >= 1.0)) throw ValidationError("effective_critical_energy: beta must be >= 1");
    if (model.mode() == QRMode::hard_wall) return model.critical_energy();

    // Solve in u = ln E. g(u) = beta ln P(e^u) - ln(1/2), decreasing.
    auto g = [&](double u) {
        // clamp only absorbs exp(log(E_last)) rounding past the last row
        const double P = reflection_probability(model, std::exp(u), mass, true);
        return beta * std::log(P) + std::log(2.0);
    };
    double lo, hi;
    if (model.mode() == QRMode::tabulated) {
        const auto& t = model.table();
        hi = std::log(t.back().E);
        lo = std::log(t.front().E) - 20.0;
        const double g_hi = g(hi);
        if (g_hi > 0.0) {
            std::ostringstream msg;
            msg << "effective_critical_energy: no bracket in table; survival at the last row "
                << "(E=" << t.back().E / constants::eV << " eV) is " << std::exp(g_hi) * 0.5
                << " > 0.5";
            throw NumericalError(msg.str());
        }
    } else {
        if (model.length().imag() == 0.0)
            throw NumericalError("effective_critical_energy: lossless scattering length, "
                                 "survival stays 1 at all energies");
        // Expand upward from a tiny energy until survival drops below 1/2.
        lo = std::log(1e-40);
        hi = lo;
        int guard = 0;
        while (g(hi) > 0.0) {
            hi += 2.0;
            if (++guard > 200) throw NumericalError("effective_critical_energy: no bracket found");
        }
    }
    if (g(lo) < 0.0) {
        std::ostringstream msg;
        msg << "effective_critical_energy: no bracket; survival at lower end "
            << std::exp(g(lo)) * 0.5 << " < 0.5";
        throw NumericalError(msg.str());
    }
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-9; };  // 1e-9 in ln E
    auto r = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    return std::exp(0.5 * (r.first + r.second));
}

}  // namespace wgsim
