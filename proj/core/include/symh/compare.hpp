#pragma once

#include "symh/field.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace symh {

// Settings for the equality experiment between the pulled-back sphere
// functional and the fiber evaluation at p = 0. The grid must be the full
// cylinder window [-1/2, 1/2]; r stays at least one cell away from the
// decision threshold 1/4 so the verdict is stable under grid jitter.
struct ExperimentConfig {
    double r = 0.2;
    GridSpec grid;
    int corpus_size = 10;
    std::uint64_t seed = 42;
    int n_levels = 512;
    double match_tol = 5e-2;
    double mismatch_margin = 0.9;
    double mollification = 1e-3;
    int threads = 1;

    void validate() const;
};

struct CorpusField {
    int id = 0;
    std::string kind;
    CylinderField field;
};

struct FieldComparison {
    int id = 0;
    std::string kind;
    double zeta_r = 0;
    double eta0 = 0;
    double gap = 0;
};

struct ComparisonReport {
    ExperimentConfig cfg;
    std::vector<FieldComparison> per_field;
    std::string verdict; // "match" | "mismatch" | "inconclusive"
    bool has_counterexample = false;
    FieldComparison counterexample;

    std::string to_json() const;
};

// Extension by zero into the unit sphere in cylindrical coordinates; the
// inclusion is the identity on cells, so areas and component counts are
// preserved exactly. The input grid must already be the full window and the
// support must stay strictly inside |p| < r.
CylinderField embed_field(const CylinderField& f, double r);

// Calabi quasi-state of the embedded field.
double zeta_r(const CylinderField& f, double r, int n_levels = 512, int threads = 1);

// Seeded mixture of band, disk-plus-underlay, annular-plateau and two-lobe
// fields supported in |p| < r; deterministic in (seed, grid, r).
std::vector<CorpusField> comparison_corpus(const ExperimentConfig& cfg);

ComparisonReport run_comparison(const ExperimentConfig& cfg);

// Plateau equal to 1 on a rounded rectangle whose area is the midpoint of
// (1/2, 2r), clamped to what fits inside the window with its taper; the
// region is contractible, so the fiber functional vanishes on it while every
// positive superlevel set dominates half the sphere.
CylinderField counterexample_field(double r, const GridSpec& spec);

struct MomentPullbackReport {
    double gbar_value = 0;  // gbar at the evaluation point
    double gbar_at_0 = 0;
    double eta_value = 0;   // eta_{p0} of the pulled-back field
    double zeta_value = 0;  // zeta_r of the pulled-back field
    double dev_eta = 0;     // |eta - gbar(p0)|
    double dev_zeta = 0;    // |zeta - gbar(0)|
};

// Checks the two moment-map pullback identities on the q-independent field
// f(q, p) = gbar(p).
MomentPullbackReport moment_pullback_check(const std::function<double(double)>& gbar,
                                           double r, double p0, const GridSpec& grid,
                                           int n_levels = 512,
                                           double mollification = 1e-3, int threads = 1);

// Annular-sector curve parameters: outer radius rho2, inner radius rho1,
// opening half-angle alpha, around the circle of squared radius 1/(n+1).
struct Gamma0Params {
    int n = 2;
    double epsilon = 0;
    double rho1 = 0;
    double rho2 = 0;
    double alpha = 0;
    double residual = 0;       // area-balance equation residual
    double curve_area_dev = 0; // |polygon area - pi/(n+1)| of the sampled curve
};

// Solves the area-balance equation for rho1 in closed form and validates
// that the resulting four-arc curve stays inside the annulus
// {0 < |z|^2 < 1/(n+1) + epsilon}. Infeasible alpha raises an error carrying
// the feasible bound.
Gamma0Params solve_gamma0(int n, double epsilon, double rho2, double alpha);

// The four-arc boundary curve as a closed polygon in the z-plane: outer arc
// counterclockwise from alpha to 2 pi - alpha, radial inward, inner arc
// clockwise back, radial outward.
std::vector<std::pair<double, double>> gamma0_curve(const Gamma0Params& gp,
                                                    int samples_per_arc = 20000);

// Shoelace area of a closed polygon.
double polygon_area(const std::vector<std::pair<double, double>>& poly);

} // namespace symh
