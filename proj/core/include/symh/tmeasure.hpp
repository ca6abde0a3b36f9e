#pragma once

#include "symh/contour.hpp"
#include "symh/field.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace symh {

// Set function on cell-mask regions that is additive on disjoint unions and
// monotone under inclusion, but not necessarily subadditive on overlaps.
// Implementations must be immutable so concurrent evaluation is safe.
class TopologicalMeasure {
public:
    virtual ~TopologicalMeasure() = default;
    virtual double evaluate(const Region& r) const = 0;
    virtual Space space() const = 0;
    virtual bool bounded() const { return true; }
    // total mass, meaningful when bounded() (for the cylinder winding measure
    // this is the value on any essential annulus around its level)
    virtual double total_mass() const = 0;
};

// Per connected component of a cylinder region: the pair of levels [a, b]
// of its two |winding| = 1 boundary circles, skipping components whose
// boundaries are all contractible. Shared by TauP0 and the level-quadrature
// eta oracle so both agree exactly.
std::vector<std::array<double, 2>> essential_boundary_intervals(const Region& r);

// 1 iff some component of the region is an essential annulus whose boundary
// levels bracket p0; winding-0 holes are ignored.
class TauP0 : public TopologicalMeasure {
public:
    explicit TauP0(double p0) : p0_(p0) {}
    double evaluate(const Region& r) const override;
    Space space() const override { return Space::cylinder; }
    double total_mass() const override { return 1.0; }
    double p0() const { return p0_; }

private:
    double p0_;
};

// Measure on the unit-area sphere: 1 iff some component has every
// complementary component of area <= 1/2. Areas within 2 cell areas of 1/2
// raise an "ambiguous at tolerance" error instead of silently choosing.
class TauCalabi : public TopologicalMeasure {
public:
    double evaluate(const Region& r) const override;
    Space space() const override { return Space::sphere; }
    double total_mass() const override { return 1.0; }
};

// Integration of a fixed nonnegative density over the region; the fully
// additive baseline. The density grid must match the region grid.
class LinearTM : public TopologicalMeasure {
public:
    explicit LinearTM(CylinderField density);
    double evaluate(const Region& r) const override;
    Space space() const override { return density_.spec.space; }
    double total_mass() const override { return total_; }
    const CylinderField& density() const { return density_; }

private:
    CylinderField density_;
    double total_;
};

// One-point compactification of an open bounded region O: evaluates regions
// of the four classes K, U, (O-K) u {inf}, (O-U) u {inf}, the last two
// marked by the at_infinity flag and resolved against the base measure.
class CompactifiedTM : public TopologicalMeasure {
public:
    CompactifiedTM(std::shared_ptr<const TopologicalMeasure> base, Region O);
    double evaluate(const Region& r) const override;
    Space space() const override { return base_->space(); }
    double total_mass() const override { return total_; }
    const Region& domain() const { return O_; }

private:
    std::shared_ptr<const TopologicalMeasure> base_;
    Region O_;
    double total_;
};

double tau_p0_eval(double p0, const Region& r);
double tau_calabi_eval(const Region& r);
LinearTM linear_tm(CylinderField density);
CompactifiedTM compactify(std::shared_ptr<const TopologicalMeasure> base, Region O);

// Layer-cake evaluation of the quasi-integral induced by tm. On the sphere:
// tm(everything) * min f plus the midpoint quadrature of tm({f >= t}) over
// [min f, max f]. On the cylinder: the positive/negative split
// zeta(f+) - zeta(f-) with zeta(g) integrating over (0, max g]. Strata whose
// threshold lands on an ambiguity of tm are retried at slightly nudged
// levels before the error is propagated. Deterministic for any thread count.
double quasi_integral(const TopologicalMeasure& tm, const CylinderField& f,
                      int n_levels = 512, int threads = 1);

// Recovers the set function of a quasi-integral on a compact mask K by
// evaluating it on plateau functions (1 on K, linear decay over an h-cell
// collar) for h = collar_cells halving down to 1; returns the last value.
// The values must be nonincreasing; a material increase signals that qi is
// not monotone and raises an error. Pass `sequence` to receive the values.
double tau_from_qi(const std::function<double(const CylinderField&)>& qi,
                   const Region& K, int collar_cells = 2,
                   std::vector<double>* sequence = nullptr);

// Axiom corpus entry: "disjoint_pair" checks additivity on the union,
// "nested_pair" checks monotonicity, "nested_triple" checks the sandwich
// tau(K) <= tau(O) <= tau(K') for K inside O inside K'.
struct AxiomCase {
    std::string name;
    std::string kind;
    std::vector<Region> regions;
};

struct AxiomCheckResult {
    std::string report_json; // list of {check, regions, expected, got, pass}
    bool all_pass = false;
};

AxiomCheckResult check_tm_axioms(const TopologicalMeasure& tm,
                                 const std::vector<AxiomCase>& corpus);

// Descriptor: {"kind":"tau_p0","p0":..} | {"kind":"tau_calabi"} |
// {"kind":"linear","density":<field>} |
// {"kind":"compactified","base":<descriptor>,"domain":<region>}
std::unique_ptr<TopologicalMeasure> measure_from_json(const std::string& text);

} // namespace symh
