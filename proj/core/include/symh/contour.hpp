#pragma once

#include "symh/field.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace symh {

// Cell mask on the cylinder or sphere. When the mask comes from a scalar
// threshold, `source` carries the field so boundary polylines and areas can
// be refined to sub-cell accuracy by projecting onto the interpolated
// isoline. `above` distinguishes {f >= t} from {f < t} masks.
struct Region {
    GridSpec spec;
    std::vector<std::uint8_t> mask;
    bool open = false;
    bool south_cap = false;
    bool north_cap = false;
    bool at_infinity = false; // set on inputs to a compactified measure

    std::shared_ptr<const CylinderField> source;
    double threshold = 0;
    bool above = true;

    bool in(int i, int j) const { return mask[spec.index(i, j)] != 0; }
    std::size_t cell_count() const;
    bool empty() const { return cell_count() == 0 && !south_cap && !north_cap; }
};

// Closed boundary polyline with lifted q (real, in units of full turns).
struct Contour {
    std::vector<std::pair<double, double>> pts; // (q lifted, p)
    bool closed = true;
    int winding = 0;
    bool on_grid_edge = false; // traced along the p-boundary of the grid
};

struct ComponentDecomposition {
    std::vector<Region> components; // ordered by smallest cell index
    std::vector<std::vector<Contour>> boundaries; // per component
};

Region superlevel_region(const CylinderField& f, double t);
Region superlevel_region(std::shared_ptr<const CylinderField> f, double t);
// mask = {f < t}; used for complements of superlevel sets
Region sublevel_region_strict(const CylinderField& f, double t);

ComponentDecomposition components(const Region& r);
// 8-connected components of the complement, with poles glued where the
// complement includes them (sphere only)
ComponentDecomposition complement_components(const Region& r);

std::vector<Contour> boundary_circles(const Region& r);
int winding(const Contour& c);
double level_of_circle(const Contour& c);
double area(const Region& r);

// essential = contains a non-contractible loop (cylinder only); computed by
// lift-offset union-find, independent of boundary tracing
std::vector<bool> component_essential_flags(const Region& r);

// areas of the complement components (sphere only), aligned with
// complement_components(r).components; derived from the region's own
// boundary so that region area plus complement areas is exactly the total
std::vector<double> complement_component_areas(const Region& r);

// mask constructors used by tests, the check suite and the CLI
Region make_band_region(const GridSpec& spec, double a, double b);
Region make_disk_region(const GridSpec& spec, double q0, double p0, double rq, double rp);
Region make_cap_region(const GridSpec& spec, bool south, double up_to_p);
Region region_union(const Region& a, const Region& b);
Region region_difference(const Region& a, const Region& b);
bool region_subset(const Region& a, const Region& b);
bool regions_disjoint(const Region& a, const Region& b);

} // namespace symh
