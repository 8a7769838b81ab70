#include "wgsim/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wgsim/errors.hpp"

namespace wgsim {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<double> cell_weights(const InterferencePattern& p) {
    const auto wx = p.pos_weights();
    const auto wv = p.vel_weights();
    std::vector<double> w(p.F.size());
    for (std::size_t j = 0; j < p.nv(); ++j)
        for (std::size_t i = 0; i < p.nx(); ++i) w[j * p.nx() + i] = wx[i] * wv[j];
    return w;
}

void check_density(const InterferencePattern& p, const char* which) {
    const double total = p.integral();
    if (!(std::abs(total - 1.0) <= 1e-6))
        throw ValidationError(std::string("fisher_information: density at ") + which +
                              " integrates to " + num(total) + ", expected 1");
}

bool same_grid(const InterferencePattern& a, const InterferencePattern& b) {
    return a.pos.values == b.pos.values && a.vel.values == b.vel.values;
}

}  // namespace

InterferencePattern normalize_density(const InterferencePattern& flux) {
    const double total = flux.integral();
    if (!(total > 0.0)) throw ValidationError("normalize_density: pattern has no flux in the window");
    InterferencePattern p = flux;
    for (auto& f : p.F) f /= total;
    p.value_unit = "1/(" + flux.pos.unit + (flux.nv() > 1 ? " " + flux.vel.unit : std::string()) + ")";
    p.meta["density_window_pos"] = num(flux.pos.values.front()) + ":" + num(flux.pos.values.back());
    p.meta["density_window_vel"] = num(flux.vel.values.front()) + ":" + num(flux.vel.values.back());
    p.meta["density_flux_in_window"] = num(total);
    return p;
}

FisherResult fisher_information(const SensitivityProblem& pr) {
    if (!pr.generator) throw ValidationError("fisher_information: no pattern generator");
    if (!(pr.N >= 1.0)) throw ValidationError("fisher_information: N must be >= 1");
    if (!(pr.da > 0.0)) throw ValidationError("fisher_information: step da must be > 0");
    const auto P0 = pr.generator(pr.a0);
    const auto Pp = pr.generator(pr.a0 + pr.da);
    const auto Pm = pr.generator(pr.a0 - pr.da);
    check_density(P0, "a");
    check_density(Pp, "a+da");
    check_density(Pm, "a-da");
    if (!same_grid(P0, Pp) || !same_grid(P0, Pm))
        throw ValidationError("fisher_information: perturbed densities are on a different grid");

    FisherResult r;
    r.dP = P0;
    r.dP.value_unit = P0.value_unit + " per m/s^2";
    const double peak = *std::max_element(P0.F.begin(), P0.F.end());
    double maxdiff = 0;
    for (std::size_t i = 0; i < P0.F.size(); ++i) {
        r.dP.F[i] = (Pp.F[i] - Pm.F[i]) / (2 * pr.da);
        maxdiff = std::max(maxdiff, std::abs(Pp.F[i] - Pm.F[i]) / 2);
    }
    r.rel_change = maxdiff / peak;
    if (r.rel_change != 0.0 && (r.rel_change < 1e-4 || r.rel_change > 1e-1)) {
        const double suggest = pr.da * 1e-2 / r.rel_change;
        throw ValidationError("fisher_information: step da = " + num(pr.da) + " changes P by " +
                              num(r.rel_change) + " of its peak (allowed 1e-4..1e-1); try da = " +
                              num(suggest));
    }
    const auto w = cell_weights(P0);
    const double floor = 1e-12 * peak;
    for (std::size_t i = 0; i < P0.F.size(); ++i) {
        if (P0.F[i] > floor)
            r.I += r.dP.F[i] * r.dP.F[i] / P0.F[i] * w[i];
        else
            r.excluded_mass += P0.F[i] * w[i];
    }
    r.meta = P0.meta;
    r.meta["a0"] = num(pr.a0);
    r.meta["da"] = num(pr.da);
    r.meta["rel_change"] = num(r.rel_change);
    r.meta["excluded_mass"] = num(r.excluded_mass);
    r.meta["caveat"] = "Cramer-Rao bound: a lower bound on sigma, valid for an unbiased efficient estimator";
    if (!pr.note.empty()) r.meta["nuisance"] = pr.note;
    r.dP.meta = r.meta;
    return r;
}

double cramer_rao(double I, double N) {
    if (!(N >= 1.0)) throw ValidationError("cramer_rao: N must be >= 1");
    if (!(I >= 0.0)) throw ValidationError("cramer_rao: information must be >= 0");
    return 1.0 / std::sqrt(N * I);
}

ShiftResult shift_experiment(const PatternGenerator& gen, double a_base, double a_extra, double N,
                             double da) {
    ShiftResult r;
    r.baseline = gen(a_base);
    r.shifted = gen(a_base + a_extra);
    if (!same_grid(r.baseline, r.shifted))
        throw ValidationError("shift_experiment: baseline and shifted scenes do not share grids");
    r.difference = r.shifted;
    for (std::size_t i = 0; i < r.difference.F.size(); ++i) r.difference.F[i] -= r.baseline.F[i];
    r.difference.meta["difference"] = "shifted - baseline";
    r.fisher = fisher_information({gen, a_base, N, da, "all other scene parameters fixed"});
    r.sigma_a = cramer_rao(r.fisher.I, N);
    r.relative_sigma = a_extra != 0.0 ? r.sigma_a / std::abs(a_extra) : 0.0;
    return r;
}

std::string format_fisher(const FisherResult& f, double N) {
    std::string s;
    s += "I_per_event=" + num(f.I) + "\n";
    s += "N=" + num(N) + "\n";
    s += "sigma=" + (f.I > 0 ? num(cramer_rao(f.I, N)) : std::string("inf")) + "\n";
    s += "excluded_mass=" + num(f.excluded_mass) + "\n";
    s += "rel_change=" + num(f.rel_change) + "\n";
    s += "caveat=" + f.meta.at("caveat") + "\n";
    return s;
}

}  // namespace wgsim
