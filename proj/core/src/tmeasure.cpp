#include "symh/tmeasure.hpp"

#include "symh/errors.hpp"
#include "symh/io.hpp"
#include "symh/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <utility>

namespace symh {

std::vector<std::array<double, 2>> essential_boundary_intervals(const Region& r) {
    if (r.spec.space != Space::cylinder)
        throw domain_error("essential boundary intervals are a cylinder notion");
    std::vector<std::array<double, 2>> out;
    if (r.cell_count() == 0) return out;
    ComponentDecomposition dec = components(r);
    for (std::size_t c = 0; c < dec.components.size(); ++c) {
        std::vector<double> levels;
        for (const Contour& ct : dec.boundaries[c])
            if (std::abs(ct.winding) == 1) levels.push_back(level_of_circle(ct));
        if (levels.empty()) continue;
        if (levels.size() != 2)
            throw domain_error("component with " + std::to_string(levels.size()) +
                               " essential boundary circles; invalid topology at this resolution");
        out.push_back({std::min(levels[0], levels[1]), std::max(levels[0], levels[1])});
    }
    return out;
}

double tau_p0_eval(double p0, const Region& r) {
    for (const auto& iv : essential_boundary_intervals(r))
        if (iv[0] <= p0 && p0 <= iv[1]) return 1.0;
    return 0.0;
}

double TauP0::evaluate(const Region& r) const { return tau_p0_eval(p0_, r); }

double tau_calabi_eval(const Region& r) {
    if (r.spec.space != Space::sphere)
        throw domain_error("the Calabi measure lives on the sphere");
    if (r.empty()) return 0.0;
    double band = 2.0 * r.spec.cell_area();
    ComponentDecomposition dec = components(r);
    int passing = 0;
    for (const Region& comp : dec.components) {
        bool pass = true;
        for (double a : complement_component_areas(comp)) {
            if (std::fabs(a - 0.5) <= band)
                throw domain_error("complement area " + format_double(a) +
                                   " is ambiguous at tolerance around 1/2");
            if (a > 0.5) {
                pass = false;
                break;
            }
        }
        if (pass) ++passing;
    }
    if (passing > 1)
        throw domain_error("several components dominate simultaneously; "
                           "ambiguous at tolerance around 1/2");
    // a region made of caps alone has no cells; with cells present, a pole
    // cap attaches to the component owning the adjacent row, so every part
    // of the region has been examined
    return passing ? 1.0 : 0.0;
}

double TauCalabi::evaluate(const Region& r) const { return tau_calabi_eval(r); }

LinearTM::LinearTM(CylinderField density) : density_(std::move(density)) {
    density_.spec.validate();
    for (double v : density_.values)
        if (!(v >= 0)) throw domain_error("linear measure density must be nonnegative");
    total_ = density_.grid_integral();
}

double LinearTM::evaluate(const Region& r) const {
    if (!(r.spec == density_.spec))
        throw domain_error("region grid does not match the density grid");
    double sum = 0;
    for (std::size_t k = 0; k < r.mask.size(); ++k)
        if (r.mask[k]) sum += density_.values[k];
    return sum * density_.spec.cell_area();
}

LinearTM linear_tm(CylinderField density) { return LinearTM(std::move(density)); }

CompactifiedTM::CompactifiedTM(std::shared_ptr<const TopologicalMeasure> base, Region O)
    : base_(std::move(base)), O_(std::move(O)) {
    if (!base_) throw domain_error("compactified measure needs a base measure");
    if (!O_.open) throw domain_error("compactification domain must be open");
    if (O_.at_infinity) throw domain_error("compactification domain must not carry the infinity point");
    if (O_.cell_count() == 0) throw domain_error("compactification domain is empty");
    total_ = base_->evaluate(O_);
}

double CompactifiedTM::evaluate(const Region& r) const {
    if (!(r.spec == O_.spec))
        throw domain_error("region grid does not match the compactification domain");
    if (!region_subset(r, O_))
        throw domain_error("region is not contained in the compactification domain; "
                           "not representable in the four classes");
    if (!r.at_infinity) return base_->evaluate(r);
    if (r.open) {
        // (O - K) u {inf} evaluates as the open part O - K
        Region inner = r;
        inner.at_infinity = false;
        return base_->evaluate(inner);
    }
    // (O - U) u {inf} evaluates as tau(O) - tau(U) with U = O minus the mask
    Region inner = r;
    inner.at_infinity = false;
    Region u = region_difference(O_, inner);
    u.open = true;
    return total_ - base_->evaluate(u);
}

CompactifiedTM compactify(std::shared_ptr<const TopologicalMeasure> base, Region O) {
    return CompactifiedTM(std::move(base), std::move(O));
}

namespace {

bool is_ambiguity(const domain_error& e) {
    return std::strstr(e.what(), "ambiguous") != nullptr;
}

// evaluate tm on {f >= t}; an ambiguous threshold is retried at nudged
// levels inside the stratum. When every nudge is still ambiguous the value
// jump of t -> tm({f >= t}) is pinned inside this one stratum, so the
// midpoint of the measure's range scores it with error at most dt/2, the
// same order as the level quadrature itself.
double stratum_value(const TopologicalMeasure& tm,
                     const std::shared_ptr<const CylinderField>& f, double t, double s) {
    const double offs[] = {0.0,    s / 16, -s / 16,     s / 8,     -s / 8,
                           s / 4, -s / 4,  3 * s / 8, -3 * s / 8};
    const int n = static_cast<int>(std::size(offs));
    for (int k = 0; k < n; ++k) {
        try {
            return tm.evaluate(superlevel_region(f, t + offs[k]));
        } catch (const domain_error& e) {
            if (!is_ambiguity(e)) throw;
        }
    }
    return 0.5 * tm.total_mass();
}

double strata_sum(const TopologicalMeasure& tm, const CylinderField& g, double lo,
                  double hi, int n_levels, int threads) {
    double dt = (hi - lo) / n_levels;
    auto sh = std::make_shared<const CylinderField>(g);
    std::vector<double> vals = parallel_blocks<double>(
        static_cast<std::size_t>(n_levels), 8, threads,
        [&](std::size_t k) { return stratum_value(tm, sh, lo + (k + 0.5) * dt, dt); });
    double sum = 0;
    for (double v : vals) sum += v;
    return sum * dt;
}

double zeta_nonneg(const TopologicalMeasure& tm, const CylinderField& g, int n_levels,
                   int threads) {
    double mx = g.max_value();
    if (mx <= 0) return 0;
    return strata_sum(tm, g, 0.0, mx, n_levels, threads);
}

} // namespace

double quasi_integral(const TopologicalMeasure& tm, const CylinderField& f, int n_levels,
                      int threads) {
    if (n_levels < 1) throw domain_error("quadrature needs at least one stratum");
    if (f.spec.space != tm.space())
        throw domain_error("field and measure live on different spaces");
    if (!tm.bounded()) throw domain_error("measure is unbounded on the support");
    if (f.spec.space == Space::sphere) {
        double mn = f.min_value();
        double mx = f.max_value();
        Region full;
        full.spec = f.spec;
        full.mask.assign(f.spec.cells(), 1);
        full.south_cap = full.north_cap = true;
        double base = tm.evaluate(full) * mn;
        if (mx <= mn) return base;
        return base + strata_sum(tm, f, mn, mx, n_levels, threads);
    }
    auto parts = pos_neg_split(f);
    return zeta_nonneg(tm, parts.first, n_levels, threads) -
           zeta_nonneg(tm, parts.second, n_levels, threads);
}

double tau_from_qi(const std::function<double(const CylinderField&)>& qi, const Region& K,
                   int collar_cells, std::vector<double>* sequence) {
    if (collar_cells < 1) throw domain_error("collar must be at least one cell");
    if (K.open) throw domain_error("plateau recovery needs a compact mask");
    if (K.at_infinity) throw domain_error("plateau recovery needs a plain mask");
    const GridSpec& g = K.spec;

    // 4-connected cell distance to the mask, q periodic, p clipped
    std::vector<int> dist(g.cells(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t k = 0; k < g.cells(); ++k)
        if (K.mask[k]) {
            dist[k] = 0;
            queue.push_back(k);
        }
    if (queue.empty()) throw domain_error("plateau recovery needs a nonempty mask");
    while (!queue.empty()) {
        std::size_t k = queue.front();
        queue.pop_front();
        int i = static_cast<int>(k) / g.np;
        int j = static_cast<int>(k) % g.np;
        const int di[] = {1, -1, 0, 0};
        const int dj[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int ni = (i + di[d] + g.nq) % g.nq;
            int nj = j + dj[d];
            if (nj < 0 || nj >= g.np) continue;
            std::size_t nk = g.index(ni, nj);
            if (dist[nk] < 0) {
                dist[nk] = dist[k] + 1;
                queue.push_back(nk);
            }
        }
    }

    std::vector<int> hs;
    for (int h = collar_cells; h >= 1; h /= 2) hs.push_back(h);
    double prev = 0;
    double last = 0;
    bool have_prev = false;
    for (int h : hs) {
        CylinderField fh;
        fh.spec = g;
        fh.values.assign(g.cells(), 0.0);
        for (std::size_t k = 0; k < g.cells(); ++k)
            if (dist[k] >= 0 && dist[k] < h)
                fh.values[k] = 1.0 - static_cast<double>(dist[k]) / h;
        double v = qi(fh);
        if (sequence) sequence->push_back(v);
        if (have_prev && v > prev + 1e-2)
            throw domain_error("plateau values increased from " + format_double(prev) +
                               " to " + format_double(v) + "; the functional is not monotone");
        prev = v;
        have_prev = true;
        last = v;
    }
    return last;
}

AxiomCheckResult check_tm_axioms(const TopologicalMeasure& tm,
                                 const std::vector<AxiomCase>& corpus) {
    nlohmann::ordered_json report = nlohmann::ordered_json::array();
    bool all = true;
    auto counts = [](const std::vector<Region>& rs) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const Region& r : rs) a.push_back(r.cell_count());
        return a;
    };
    for (const AxiomCase& cs : corpus) {
        nlohmann::ordered_json entry;
        entry["check"] = cs.name;
        entry["kind"] = cs.kind;
        entry["regions"] = counts(cs.regions);
        bool pass = false;
        try {
            if (cs.kind == "disjoint_pair") {
                if (cs.regions.size() != 2) throw domain_error("disjoint_pair needs two regions");
                if (!regions_disjoint(cs.regions[0], cs.regions[1]))
                    throw domain_error("regions overlap");
                double a = tm.evaluate(cs.regions[0]);
                double b = tm.evaluate(cs.regions[1]);
                double u = tm.evaluate(region_union(cs.regions[0], cs.regions[1]));
                entry["expected"] = quantize12(a + b);
                entry["got"] = quantize12(u);
                pass = std::fabs(a + b - u) <= 1e-9 * (1.0 + std::fabs(a + b));
            } else if (cs.kind == "nested_pair") {
                if (cs.regions.size() != 2) throw domain_error("nested_pair needs two regions");
                if (!region_subset(cs.regions[0], cs.regions[1]))
                    throw domain_error("first region is not inside the second");
                double a = tm.evaluate(cs.regions[0]);
                double b = tm.evaluate(cs.regions[1]);
                entry["expected"] = quantize12(a);
                entry["got"] = quantize12(b);
                pass = a <= b + 1e-12;
            } else if (cs.kind == "nested_triple") {
                if (cs.regions.size() != 3) throw domain_error("nested_triple needs three regions");
                if (!region_subset(cs.regions[0], cs.regions[1]) ||
                    !region_subset(cs.regions[1], cs.regions[2]))
                    throw domain_error("regions are not nested");
                double a = tm.evaluate(cs.regions[0]);
                double b = tm.evaluate(cs.regions[1]);
                double c = tm.evaluate(cs.regions[2]);
                entry["expected"] = nlohmann::ordered_json::array({quantize12(a), quantize12(b)});
                entry["got"] = nlohmann::ordered_json::array({quantize12(b), quantize12(c)});
                pass = a <= b + 1e-12 && b <= c + 1e-12;
            } else {
                throw domain_error("unknown axiom case kind: " + cs.kind);
            }
        } catch (const domain_error& e) {
            entry["error"] = e.what();
            pass = false;
        }
        entry["pass"] = pass;
        all = all && pass;
        report.push_back(entry);
    }
    AxiomCheckResult res;
    res.report_json = report.dump(2);
    res.all_pass = all;
    return res;
}

std::unique_ptr<TopologicalMeasure> measure_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        throw domain_error("malformed JSON input");
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw domain_error("measure descriptor: missing \"kind\"");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "tau_p0") {
        if (!j.contains("p0") || !j["p0"].is_number())
            throw domain_error("measure descriptor: tau_p0 needs a numeric \"p0\"");
        return std::make_unique<TauP0>(j["p0"].get<double>());
    }
    if (kind == "tau_calabi") return std::make_unique<TauCalabi>();
    if (kind == "linear") {
        if (!j.contains("density"))
            throw domain_error("measure descriptor: linear needs a \"density\" field");
        return std::make_unique<LinearTM>(field_from_json(j["density"].dump()));
    }
    if (kind == "compactified") {
        if (!j.contains("base") || !j.contains("domain"))
            throw domain_error("measure descriptor: compactified needs \"base\" and \"domain\"");
        std::shared_ptr<const TopologicalMeasure> base = measure_from_json(j["base"].dump());
        return std::make_unique<CompactifiedTM>(std::move(base),
                                                region_from_json(j["domain"].dump()));
    }
    throw domain_error("unknown measure kind: " + kind);
}

} // namespace symh
