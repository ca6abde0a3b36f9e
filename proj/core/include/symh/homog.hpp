#pragma once

#include "symh/field.hpp"

#include <array>
#include <vector>

namespace symh {

// Piecewise-linear profile H(f) over p. Samples cover the support band
// [p_lo, p_hi] of the input; the profile is identically zero outside it
// (distant fibers carry the zero value). Repeated p entries encode jump-free
// plateau corners; eval interpolates linearly between neighbours.
struct HomogenizedProfile {
    std::vector<double> p_samples; // nondecreasing
    std::vector<double> values;
    double p_lo = 0;
    double p_hi = 0;

    double eval(double p) const;
    // extrema over all of R, so 0 always participates
    double max_value() const;
    double min_value() const;
};

// Atoms plus an optional nonnegative sampled density on [density_p_min,
// density_p_max] (uniform samples, endpoints included).
struct RadonMeasure {
    struct Atom {
        double p = 0;
        double weight = 0;
    };
    std::vector<Atom> atoms;
    std::vector<double> density;
    double density_p_min = 0;
    double density_p_max = 0;
};

// Homogenization of a nice field: descends f to its labeled level path and
// reads the profile off the labels. Throws if the field is not nice.
HomogenizedProfile homogenize(const CylinderField& f, int threads = 1);

// Homogenization of an arbitrary compactly supported field. Nice inputs are
// homogenized directly; others are perturbed by a fixed deterministic
// nice-making perturbation of sup norm <= mollification first, which moves
// the result by at most that much.
HomogenizedProfile homogenize_general(const CylinderField& f,
                                      double mollification = 1e-3,
                                      int threads = 1);

// The deterministic perturbation used by homogenize_general, exposed for
// tests: a structured low-frequency field of sup norm eps added to f.
CylinderField nice_perturbation(const CylinderField& f, double eps, int attempt);

double eta(const CylinderField& f, double p0, double mollification = 1e-3,
           int threads = 1);

// Level quadrature oracle for eta: integrates tau_{p0}({f+- >= t}) by the
// midpoint rule, entirely independent of the Reeb construction.
double eta_oracle(const CylinderField& f, double p0, int n_levels = 512,
                  int threads = 1);

// Batch form of eta_oracle: the per-stratum annulus intervals do not depend
// on p0, so one construction serves many evaluation points.
class EtaOracle {
public:
    EtaOracle(const CylinderField& f, int n_levels = 512, int threads = 1);
    double eval(double p0) const;

private:
    struct Part {
        double dt = 0;
        std::vector<std::vector<std::array<double, 2>>> strata;
    };
    static Part build_part(const CylinderField& g, int n_levels, int threads);
    static double eval_part(const Part& part, double p0);
    Part pos_, neg_;
};

double eta_mu(const CylinderField& f, const RadonMeasure& mu,
              double mollification = 1e-3, int threads = 1);

double c_plus(const CylinderField& f, double mollification = 1e-3,
              int threads = 1);
double c_minus(const CylinderField& f, double mollification = 1e-3,
               int threads = 1);

// Largest t such that {f >= t} still contains a non-contractible loop,
// located by bisection at value resolution (max f - min f) / 2^14; equals
// the supremum over essential circles L of min_L f at grid resolution.
double c_plus_oracle(const CylinderField& f);

// Asymptotic Hofer norm max H(f) - min H(f), computed from one profile.
double hofer_asymptotic(const CylinderField& f, double mollification = 1e-3,
                        int threads = 1);

} // namespace symh
