#pragma once

#include <functional>
#include <map>
#include <string>

#include "wgsim/propagation.hpp"

namespace wgsim {

// Returns a normalized probability density P(x, v) for a value of the acceleration.
using PatternGenerator = std::function<InterferencePattern(double a)>;

struct SensitivityProblem {
    PatternGenerator generator;
    double a0 = 0.0;   // nominal acceleration, m/s^2
    double N = 1.0;    // event count
    double da = 0.0;   // central-difference step, m/s^2
    std::string note;  // nuisance parameters and anything else held fixed
};

struct FisherResult {
    double I = 0.0;              // per-event information, (m/s^2)^-2
    double excluded_mass = 0.0;  // probability in cells below the floor
    double rel_change = 0.0;     // max |P(a+da) - P(a-da)| / 2 over max P(a)
    InterferencePattern dP;      // dP/da
    std::map<std::string, std::string> meta;
};

// Divides a flux pattern by its integral over the window, so it becomes a density.
InterferencePattern normalize_density(const InterferencePattern& flux);

// I = sum (dP/da)^2 / P dx dv with a central difference at step da. Cells with
// P <= 1e-12 max(P) are skipped and their mass reported. Throws ValidationError when
// a density is not normalized to 1e-6, the grids differ, or the step moves P by less
// than 1e-4 or more than 1e-1 of its peak (the message suggests a step).
FisherResult fisher_information(const SensitivityProblem& problem);

// 1 / sqrt(N I)
double cramer_rao(double I, double N);

struct ShiftResult {
    InterferencePattern baseline;
    InterferencePattern shifted;
    InterferencePattern difference;  // shifted - baseline
    FisherResult fisher;             // about the baseline acceleration
    double sigma_a = 0.0;            // Cramer-Rao bound on the extra acceleration
    double relative_sigma = 0.0;     // sigma_a / a_extra (0 when a_extra = 0)
};

// Compares the densities at a_base and a_base + a_extra and bounds a shift of the
// extra acceleration with N events.
ShiftResult shift_experiment(const PatternGenerator& gen, double a_base, double a_extra, double N,
                             double da);

// a = q E / m
inline double charge_acceleration(double q, double field, double mass) { return q * field / mass; }

// key=value report lines (I_per_event, N, sigma, excluded_mass, ...).
std::string format_fisher(const FisherResult& f, double N);

}  // namespace wgsim
