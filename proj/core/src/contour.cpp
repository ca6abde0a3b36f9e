#include "symh/contour.hpp"
#include "symh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace symh {

std::size_t Region::cell_count() const {
    std::size_t n = 0;
    for (auto m : mask)
        if (m) ++n;
    return n;
}

Region superlevel_region(const CylinderField& f, double t) {
    return superlevel_region(std::make_shared<CylinderField>(f), t);
}

Region superlevel_region(std::shared_ptr<const CylinderField> fp, double t) {
    const CylinderField& f = *fp;
    Region r;
    r.spec = f.spec;
    r.mask.resize(f.spec.cells());
    for (std::size_t k = 0; k < f.values.size(); ++k) r.mask[k] = f.values[k] >= t ? 1 : 0;
    r.open = t <= 0;
    r.source = std::move(fp);
    r.threshold = t;
    r.above = true;
    if (f.spec.space == Space::sphere) {
        // the pole joins the region only when the whole adjacent row does
        bool south = true, north = true;
        for (int i = 0; i < f.spec.nq; ++i) {
            if (!r.mask[f.spec.index(i, 0)]) south = false;
            if (!r.mask[f.spec.index(i, f.spec.np - 1)]) north = false;
        }
        r.south_cap = south;
        r.north_cap = north;
    }
    return r;
}

Region sublevel_region_strict(const CylinderField& f, double t) {
    Region r = superlevel_region(f, t);
    for (auto& m : r.mask) m = m ? 0 : 1;
    r.above = false;
    bool sc = r.south_cap, nc = r.north_cap;
    if (f.spec.space == Space::sphere) {
        r.south_cap = !sc;
        r.north_cap = !nc;
        // complement caps also require a full adjacent row
        for (int i = 0; i < f.spec.nq; ++i) {
            if (!r.mask[f.spec.index(i, 0)]) r.south_cap = false;
            if (!r.mask[f.spec.index(i, f.spec.np - 1)]) r.north_cap = false;
        }
    }
    r.open = !r.open;
    return r;
}

namespace {

// union-find with q-lift offsets: detects components that wrap the cylinder
struct LiftUF {
    std::vector<int> parent;
    std::vector<int> rank_;
    std::vector<long> off; // lift(x) - lift(parent(x))
    std::vector<std::uint8_t> wrap;

    explicit LiftUF(std::size_t n) : parent(n), rank_(n, 0), off(n, 0), wrap(n, 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    std::pair<int, long> find(int x) {
        long total = 0;
        int r = x;
        while (parent[r] != r) {
            total += off[r];
            r = parent[r];
        }
        // path compression with offset accumulation
        int cur = x;
        long acc = total;
        while (parent[cur] != cur) {
            int next = parent[cur];
            long step = off[cur];
            parent[cur] = r;
            off[cur] = acc;
            acc -= step;
            cur = next;
        }
        return {r, total};
    }

    // d = lift(a) - lift(b) along the connecting edge
    void unite(int a, int b, long d) {
        auto [ra, oa] = find(a);
        auto [rb, ob] = find(b);
        if (ra == rb) {
            if (oa - ob != d) wrap[ra] = 1;
            return;
        }
        bool w = wrap[ra] || wrap[rb];
        if (rank_[ra] < rank_[rb]) {
            // lift(ra) = lift(a) - oa = lift(b) + d - oa = lift(rb) + ob + d - oa
            off[ra] = ob + d - oa;
            parent[ra] = rb;
            wrap[rb] = w;
        } else {
            off[rb] = oa - d - ob;
            parent[rb] = ra;
            wrap[ra] = w;
            if (rank_[ra] == rank_[rb]) ++rank_[ra];
        }
    }
};

constexpr long kOutSouthPole = -1;
constexpr long kOutNorthPole = -2;
constexpr long kOutGridEdge = -3;

struct Tracer {
    const Region& r;
    const GridSpec& g;
    std::vector<std::uint8_t> visited; // cell*4 + side

    explicit Tracer(const Region& reg) : r(reg), g(reg.spec), visited(reg.spec.cells() * 4, 0) {}

    bool cell_in(long x, int y) const {
        if (y < 0) return r.south_cap;
        if (y >= g.np) return r.north_cap;
        int i = static_cast<int>(((x % g.nq) + g.nq) % g.nq);
        return r.in(i, y);
    }

    // sides: 0 south, 1 east, 2 north, 3 west
    std::size_t edge_id(long x, int y, int side) const {
        int i = static_cast<int>(((x % g.nq) + g.nq) % g.nq);
        return g.index(i, y) * 4 + side;
    }

    // out-cell reference across a given side of in-cell (x,y)
    long out_ref(long x, int y, int side) const {
        long nx = x;
        int ny = y;
        switch (side) {
            case 0: ny = y - 1; break;
            case 1: nx = x + 1; break;
            case 2: ny = y + 1; break;
            case 3: nx = x - 1; break;
        }
        if (ny < 0) return kOutSouthPole;
        if (ny >= g.np) return kOutNorthPole;
        int i = static_cast<int>(((nx % g.nq) + g.nq) % g.nq);
        return static_cast<long>(g.index(i, ny));
    }

    // directed edge along a side of in-cell (x,y), region on the left
    struct Dedge {
        long vx;
        int vy;
        int dir; // 0 +q, 1 +p, 2 -q, 3 -p
    };

    static Dedge side_edge(long x, int y, int side) {
        switch (side) {
            case 0: return {x, y, 0};
            case 1: return {x + 1, y, 1};
            case 2: return {x + 1, y + 1, 2};
            default: return {x, y + 1, 3};
        }
    }

    // in-cell and side owning a directed edge (inverse of side_edge)
    static void edge_owner(const Dedge& e, long& x, int& y, int& side) {
        switch (e.dir) {
            case 0: x = e.vx; y = e.vy; side = 0; return;
            case 1: x = e.vx - 1; y = e.vy; side = 1; return;
            case 2: x = e.vx - 1; y = e.vy - 1; side = 2; return;
            default: x = e.vx; y = e.vy - 1; side = 3; return;
        }
    }

    static Dedge advance(const Dedge& e) {
        switch (e.dir) {
            case 0: return {e.vx + 1, e.vy, 0};
            case 1: return {e.vx, e.vy + 1, 1};
            case 2: return {e.vx - 1, e.vy, 2};
            default: return {e.vx, e.vy - 1, 3};
        }
    }

    // left-ahead and right-ahead cells at the end vertex of e
    void ahead_cells(const Dedge& end, bool& left_in, bool& right_in) const {
        switch (end.dir) {
            case 0:
                left_in = cell_in(end.vx, end.vy);
                right_in = cell_in(end.vx, end.vy - 1);
                return;
            case 1:
                left_in = cell_in(end.vx - 1, end.vy);
                right_in = cell_in(end.vx, end.vy);
                return;
            case 2:
                left_in = cell_in(end.vx - 1, end.vy - 1);
                right_in = cell_in(end.vx - 1, end.vy);
                return;
            default:
                left_in = cell_in(end.vx, end.vy - 1);
                right_in = cell_in(end.vx - 1, end.vy - 1);
                return;
        }
    }

    bool is_boundary_side(int i, int j, int side) const {
        if (!r.in(i, j)) return false;
        long out = out_ref(i, j, side);
        if (out == kOutSouthPole) return !r.south_cap;
        if (out == kOutNorthPole) return !r.north_cap;
        int oi = static_cast<int>(out / g.np);
        int oj = static_cast<int>(out % g.np);
        return !r.in(oi, oj);
    }

    // crossing point of the isoline on the dual segment between cell centers,
    // or a cell-edge anchor when no field is attached
    std::pair<double, double> edge_point(const Dedge& e) const {
        long cx;
        int cy, side;
        edge_owner(e, cx, cy, side);
        long out = out_ref(cx, cy, side);
        const CylinderField* f = r.source.get();
        if (f && out >= 0) {
            int oi = static_cast<int>(out / g.np);
            int oj = static_cast<int>(out % g.np);
            int ci = static_cast<int>(((cx % g.nq) + g.nq) % g.nq);
            double vin = f->at(ci, cy);
            double vout = f->at(oi, oj);
            double t = r.threshold;
            double s = (t - vin) / (vout - vin);
            if (!(s >= 0 && s <= 1)) s = 0.5;
            // lifted center coordinates; the out-cell differs by one step
            double qx = (static_cast<double>(cx) + 0.5) / g.nq;
            double py = g.p_center(cy);
            double oqx = qx, opy = py;
            switch (side) {
                case 0: opy = g.p_center(cy - 1); break;
                case 1: oqx = (static_cast<double>(cx) + 1.5) / g.nq; break;
                case 2: opy = g.p_center(cy + 1); break;
                case 3: oqx = (static_cast<double>(cx) - 0.5) / g.nq; break;
            }
            return {qx + s * (oqx - qx), py + s * (opy - py)};
        }
        // end vertex of the directed edge, in grid units
        return {static_cast<double>(advance(e).vx) / g.nq, g.p_edge(advance(e).vy)};
    }

    Contour trace_from(long x0, int y0, int side0, long& first_out_ref) {
        Dedge start = side_edge(x0, y0, side0);
        Dedge e = start;
        Contour c;
        c.on_grid_edge = true;
        first_out_ref = kOutGridEdge;
        long sx = start.vx;
        for (;;) {
            long cx;
            int cy, side;
            edge_owner(e, cx, cy, side);
            visited[edge_id(cx, cy, side)] = 1;
            long oref = out_ref(cx, cy, side);
            if (first_out_ref == kOutGridEdge) first_out_ref = oref;
            if (cy != 0 || side != 0) {
                if (cy != g.np - 1 || side != 2) c.on_grid_edge = false;
            }
            c.pts.push_back(edge_point(e));
            Dedge straight = advance(e);
            bool left_in, right_in;
            ahead_cells(straight, left_in, right_in);
            Dedge next;
            if (!left_in) {
                next = {straight.vx, straight.vy, (e.dir + 1) % 4};
            } else if (right_in) {
                next = {straight.vx, straight.vy, (e.dir + 3) % 4};
            } else {
                next = straight;
            }
            // closure: same directed edge modulo the q-period
            long nx;
            int ny, nside;
            edge_owner(next, nx, ny, nside);
            if (ny == y0 && nside == side0 &&
                ((nx % g.nq) + g.nq) % g.nq == ((x0 % g.nq) + g.nq) % g.nq) {
                long dq = next.vx - sx;
                if (dq % g.nq != 0) throw domain_error("boundary trace failed to close");
                c.winding = static_cast<int>(dq / g.nq);
                break;
            }
            e = next;
        }
        c.closed = true;
        return c;
    }
};

std::vector<Contour> trace_boundary(const Region& r, std::vector<long>* out_refs) {
    const GridSpec& g = r.spec;
    if (g.space == Space::sphere) {
        if (r.south_cap || r.north_cap) {
            for (int i = 0; i < g.nq; ++i) {
                if (r.south_cap && !r.in(i, 0))
                    throw domain_error("south cap flag requires the full bottom row");
                if (r.north_cap && !r.in(i, g.np - 1))
                    throw domain_error("north cap flag requires the full top row");
            }
        }
    }
    Tracer tr(r);
    std::vector<Contour> out;
    if (out_refs) out_refs->clear();
    for (int i = 0; i < g.nq; ++i) {
        for (int j = 0; j < g.np; ++j) {
            for (int side = 0; side < 4; ++side) {
                if (!tr.is_boundary_side(i, j, side)) continue;
                if (tr.visited[tr.edge_id(i, j, side)]) continue;
                long oref = 0;
                Contour c = tr.trace_from(i, j, side, oref);
                if (c.pts.size() < 3 && c.winding == 0)
                    throw domain_error("degenerate one-cell-wide feature in boundary trace");
                out.push_back(std::move(c));
                if (out_refs) out_refs->push_back(oref);
            }
        }
    }
    return out;
}

// closed trapezoid integral of p dq over the polyline
double closed_p_dq(const Contour& c) {
    double s = 0;
    const auto& v = c.pts;
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        s += 0.5 * (v[k].second + v[k + 1].second) * (v[k + 1].first - v[k].first);
    // closing segment returns to the first point shifted by the winding
    double qc = v.front().first + c.winding;
    s += 0.5 * (v.back().second + v.front().second) * (qc - v.back().first);
    return s;
}

} // namespace

std::vector<Contour> boundary_circles(const Region& r) {
    if (r.empty()) throw domain_error("boundary_circles requires a nonempty region");
    return trace_boundary(r, nullptr);
}

int winding(const Contour& c) {
    if (!c.closed) throw domain_error("winding requires a closed polyline");
    return c.winding;
}

double level_of_circle(const Contour& c) {
    if (!c.closed) throw domain_error("level requires a closed circle");
    if (c.winding != 1 && c.winding != -1)
        throw domain_error("level is defined for non-contractible circles only (winding " +
                           std::to_string(c.winding) + ")");
    // orient so that the circle makes one positive turn
    return closed_p_dq(c) / c.winding;
}

double area(const Region& r) {
    const GridSpec& g = r.spec;
    double cap_term = 0;
    if (g.space == Space::sphere) {
        if (r.south_cap) cap_term += -g.p_min;
        if (r.north_cap) cap_term += g.p_max;
    }
    std::vector<Contour> cs = trace_boundary(r, nullptr);
    if (cs.empty()) return static_cast<double>(r.cell_count()) * g.cell_area() + 0.0;
    double s = 0;
    for (const auto& c : cs) s += closed_p_dq(c);
    return -s + cap_term;
}

namespace {

struct CompLabels {
    std::vector<int> comp_of_cell; // -1 outside
    int n_comps = 0;
    std::vector<std::size_t> smallest_cell; // per comp
    std::vector<std::uint8_t> essential;    // per comp (4-conn runs only)
    int south_pole_comp = -1;
    int north_pole_comp = -1;
};

CompLabels label_cells(const Region& r, bool conn8, bool use_mask_complement,
                       bool glue_poles_in_set) {
    const GridSpec& g = r.spec;
    std::size_t n = g.cells();
    auto in_set = [&](std::size_t k) {
        bool m = r.mask[k] != 0;
        return use_mask_complement ? !m : m;
    };
    LiftUF uf(n);
    for (int i = 0; i < g.nq; ++i) {
        for (int j = 0; j < g.np; ++j) {
            std::size_t k = g.index(i, j);
            if (!in_set(k)) continue;
            int ie = (i + 1) % g.nq;
            std::size_t east = g.index(ie, j);
            if (in_set(east)) uf.unite(static_cast<int>(k), static_cast<int>(east), -1);
            if (j + 1 < g.np) {
                std::size_t north = g.index(i, j + 1);
                if (in_set(north)) uf.unite(static_cast<int>(k), static_cast<int>(north), 0);
                if (conn8) {
                    std::size_t ne = g.index(ie, j + 1);
                    if (in_set(ne)) uf.unite(static_cast<int>(k), static_cast<int>(ne), -1);
                    std::size_t nw = g.index((i + g.nq - 1) % g.nq, j + 1);
                    if (in_set(nw)) uf.unite(static_cast<int>(k), static_cast<int>(nw), 1);
                }
            }
        }
    }
    // glue rows through poles that belong to the set (sphere)
    bool glue_south = false, glue_north = false;
    if (g.space == Space::sphere && glue_poles_in_set) {
        bool pole_s_in = use_mask_complement ? !r.south_cap : r.south_cap;
        bool pole_n_in = use_mask_complement ? !r.north_cap : r.north_cap;
        glue_south = pole_s_in;
        glue_north = pole_n_in;
        if (pole_s_in) {
            int first = -1;
            for (int i = 0; i < g.nq; ++i) {
                std::size_t k = g.index(i, 0);
                if (!in_set(k)) continue;
                if (first < 0) first = static_cast<int>(k);
                else uf.unite(first, static_cast<int>(k), 0); // lift is moot through a pole
            }
        }
        if (pole_n_in) {
            int first = -1;
            for (int i = 0; i < g.nq; ++i) {
                std::size_t k = g.index(i, g.np - 1);
                if (!in_set(k)) continue;
                if (first < 0) first = static_cast<int>(k);
                else uf.unite(first, static_cast<int>(k), 0);
            }
        }
    }
    CompLabels out;
    out.comp_of_cell.assign(n, -1);
    std::vector<int> root_to_comp(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        if (!in_set(k)) continue;
        auto [root, off] = uf.find(static_cast<int>(k));
        (void)off;
        if (root_to_comp[root] < 0) {
            root_to_comp[root] = out.n_comps++;
            out.smallest_cell.push_back(k);
            out.essential.push_back(uf.wrap[root]);
        }
        out.comp_of_cell[k] = root_to_comp[root];
    }
    if (glue_south) {
        for (int i = 0; i < g.nq; ++i) {
            std::size_t k = g.index(i, 0);
            if (in_set(k)) { out.south_pole_comp = out.comp_of_cell[k]; break; }
        }
    }
    if (glue_north) {
        for (int i = 0; i < g.nq; ++i) {
            std::size_t k = g.index(i, g.np - 1);
            if (in_set(k)) { out.north_pole_comp = out.comp_of_cell[k]; break; }
        }
    }
    return out;
}

ComponentDecomposition decompose(const Region& r, bool complement) {
    const GridSpec& g = r.spec;
    CompLabels lab = label_cells(r, complement, complement, true);
    ComponentDecomposition dec;
    dec.components.resize(lab.n_comps);
    for (int c = 0; c < lab.n_comps; ++c) {
        Region& comp = dec.components[c];
        comp.spec = g;
        comp.open = complement ? !r.open : r.open;
        comp.mask.assign(g.cells(), 0);
        comp.source = r.source;
        comp.threshold = r.threshold;
        comp.above = complement ? !r.above : r.above;
    }
    for (std::size_t k = 0; k < g.cells(); ++k) {
        int c = lab.comp_of_cell[k];
        if (c >= 0) dec.components[c].mask[k] = 1;
    }
    if (g.space == Space::sphere) {
        bool pole_s = complement ? !r.south_cap : r.south_cap;
        bool pole_n = complement ? !r.north_cap : r.north_cap;
        if (pole_s && lab.south_pole_comp >= 0)
            dec.components[lab.south_pole_comp].south_cap = true;
        if (pole_n && lab.north_pole_comp >= 0)
            dec.components[lab.north_pole_comp].north_cap = true;
    }
    dec.boundaries.resize(lab.n_comps);
    for (int c = 0; c < lab.n_comps; ++c)
        dec.boundaries[c] = trace_boundary(dec.components[c], nullptr);
    return dec;
}

} // namespace

ComponentDecomposition components(const Region& r) { return decompose(r, false); }

ComponentDecomposition complement_components(const Region& r) { return decompose(r, true); }

std::vector<bool> component_essential_flags(const Region& r) {
    CompLabels lab = label_cells(r, false, false, true);
    std::vector<bool> flags(lab.n_comps);
    for (int c = 0; c < lab.n_comps; ++c) flags[c] = lab.essential[c] != 0;
    return flags;
}

std::vector<double> complement_component_areas(const Region& r) {
    const GridSpec& g = r.spec;
    if (g.space != Space::sphere)
        throw domain_error("complement areas are computed on the sphere only");
    CompLabels lab = label_cells(r, true, true, true);
    std::vector<double> areas(lab.n_comps, 0.0);
    std::vector<long> out_refs;
    std::vector<Contour> cs = trace_boundary(r, &out_refs);
    // each contour is adjacent to exactly one complement component; its
    // oriented p dq integral, taken with the region on the left, equals the
    // signed contribution of that contour to the complement side
    for (std::size_t k = 0; k < cs.size(); ++k) {
        long oref = out_refs[k];
        int comp = -1;
        if (oref >= 0) comp = lab.comp_of_cell[oref];
        else if (oref == kOutSouthPole) comp = lab.south_pole_comp;
        else if (oref == kOutNorthPole) comp = lab.north_pole_comp;
        if (comp < 0) continue; // pole-only component, area zero by symmetry
        areas[comp] += closed_p_dq(cs[k]);
    }
    if (!r.south_cap && lab.south_pole_comp >= 0) areas[lab.south_pole_comp] += -g.p_min;
    if (!r.north_cap && lab.north_pole_comp >= 0) areas[lab.north_pole_comp] += g.p_max;
    return areas;
}

Region make_band_region(const GridSpec& spec, double a, double b) {
    spec.validate();
    Region r;
    r.spec = spec;
    r.mask.assign(spec.cells(), 0);
    for (int j = 0; j < spec.np; ++j) {
        double p = spec.p_center(j);
        if (p < a || p > b) continue;
        for (int i = 0; i < spec.nq; ++i) r.mask[spec.index(i, j)] = 1;
    }
    return r;
}

Region make_disk_region(const GridSpec& spec, double q0, double p0, double rq, double rp) {
    spec.validate();
    Region r;
    r.spec = spec;
    r.mask.assign(spec.cells(), 0);
    for (int i = 0; i < spec.nq; ++i) {
        double dq = std::fabs(spec.q_center(i) - q0);
        dq = std::min(dq, 1 - dq);
        for (int j = 0; j < spec.np; ++j) {
            double dp = spec.p_center(j) - p0;
            double u = dq / rq, v = dp / rp;
            if (u * u + v * v <= 1) r.mask[spec.index(i, j)] = 1;
        }
    }
    return r;
}

Region make_cap_region(const GridSpec& spec, bool south, double up_to_p) {
    spec.validate();
    if (spec.space != Space::sphere) throw domain_error("cap regions live on the sphere");
    Region r;
    r.spec = spec;
    r.mask.assign(spec.cells(), 0);
    for (int j = 0; j < spec.np; ++j) {
        double p = spec.p_center(j);
        bool take = south ? (p <= up_to_p) : (p >= up_to_p);
        if (!take) continue;
        for (int i = 0; i < spec.nq; ++i) r.mask[spec.index(i, j)] = 1;
    }
    r.south_cap = south;
    r.north_cap = !south;
    return r;
}

Region region_union(const Region& a, const Region& b) {
    if (!(a.spec == b.spec)) throw domain_error("region union requires identical grids");
    Region r = a;
    for (std::size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] || b.mask[k];
    r.south_cap = a.south_cap || b.south_cap;
    r.north_cap = a.north_cap || b.north_cap;
    r.source.reset();
    return r;
}

Region region_difference(const Region& a, const Region& b) {
    if (!(a.spec == b.spec)) throw domain_error("region difference requires identical grids");
    Region r = a;
    for (std::size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] && !b.mask[k];
    r.south_cap = a.south_cap && !b.south_cap;
    r.north_cap = a.north_cap && !b.north_cap;
    r.source.reset();
    return r;
}

bool region_subset(const Region& a, const Region& b) {
    if (!(a.spec == b.spec)) return false;
    for (std::size_t k = 0; k < a.mask.size(); ++k)
        if (a.mask[k] && !b.mask[k]) return false;
    if (a.south_cap && !b.south_cap) return false;
    if (a.north_cap && !b.north_cap) return false;
    return true;
}

bool regions_disjoint(const Region& a, const Region& b) {
    if (!(a.spec == b.spec)) return false;
    for (std::size_t k = 0; k < a.mask.size(); ++k)
        if (a.mask[k] && b.mask[k]) return false;
    if (a.south_cap && b.south_cap) return false;
    if (a.north_cap && b.north_cap) return false;
    return true;
}

} // namespace symh
