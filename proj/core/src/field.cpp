#include "symh/field.hpp"
#include "symh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace symh {

void GridSpec::validate() const {
    if (nq <= 0 || np <= 0) throw domain_error("grid dimensions must be positive");
    if (!(p_min < p_max)) throw domain_error("grid requires p_min < p_max");
    if (space == Space::sphere) {
        if (std::fabs(p_min + 0.5) > 1e-12 || std::fabs(p_max - 0.5) > 1e-12)
            throw domain_error("sphere grids must span [-1/2, 1/2]");
    }
}

double CylinderField::interp_q(double q, int j) const {
    double x = q * spec.nq - 0.5;
    double fl = std::floor(x);
    double frac = x - fl;
    long i0 = static_cast<long>(fl);
    long n = spec.nq;
    long a = ((i0 % n) + n) % n;
    long b = (a + 1) % n;
    return (1 - frac) * at(static_cast<int>(a), j) + frac * at(static_cast<int>(b), j);
}

std::optional<std::pair<int, int>> CylinderField::support_rows(double tol) const {
    int lo = spec.np, hi = -1;
    for (int j = 0; j < spec.np; ++j) {
        bool nonzero = false;
        for (int i = 0; i < spec.nq; ++i)
            if (std::fabs(at(i, j)) > tol) { nonzero = true; break; }
        if (nonzero) {
            if (j < lo) lo = j;
            hi = j;
        }
    }
    if (hi < 0) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::optional<std::pair<double, double>> CylinderField::support_band(double tol) const {
    auto rows = support_rows(tol);
    if (!rows) return std::nullopt;
    return std::make_pair(spec.p_edge(rows->first), spec.p_edge(rows->second + 1));
}

double CylinderField::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

double CylinderField::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

double CylinderField::pole_value(bool south) const {
    int j = south ? 0 : spec.np - 1;
    double s = 0;
    for (int i = 0; i < spec.nq; ++i) s += at(i, j);
    return s / spec.nq;
}

double CylinderField::grid_integral() const {
    double s = 0;
    for (double v : values) s += v;
    return s * spec.cell_area();
}

CylinderField sample_field(const Expression& expr, const GridSpec& spec) {
    spec.validate();
    CylinderField f;
    f.spec = spec;
    f.values.resize(spec.cells());
    for (int i = 0; i < spec.nq; ++i) {
        double q = spec.q_center(i);
        for (int j = 0; j < spec.np; ++j) {
            double v = expr.eval(q, spec.p_center(j));
            if (!std::isfinite(v))
                throw domain_error("expression evaluation failed at cell (" + std::to_string(i) +
                                   "," + std::to_string(j) + "), q=" + std::to_string(q) +
                                   ", p=" + std::to_string(spec.p_center(j)));
            f.at(i, j) = v;
        }
    }
    return f;
}

CylinderField apply_shear(const CylinderField& f, const ShearMap& m) {
    if (static_cast<int>(m.profile.size()) != f.spec.np)
        throw domain_error("shear profile length must match the grid row count");
    if (std::fabs(m.profile.front()) > kSupportTol || std::fabs(m.profile.back()) > kSupportTol)
        throw domain_error("shear profile must vanish at the p-range boundary");
    CylinderField out;
    out.spec = f.spec;
    out.values.resize(f.values.size());
    for (int j = 0; j < f.spec.np; ++j) {
        double s = m.profile[j];
        for (int i = 0; i < f.spec.nq; ++i)
            out.at(i, j) = f.interp_q(f.spec.q_center(i) - s, j);
    }
    return out;
}

namespace {

// symbolic comparison (value, cell index); the virtual end vertices sort
// below every real cell of the same value
inline bool symb_less(double va, long ia, double vb, long ib) {
    if (va != vb) return va < vb;
    return ia < ib;
}

} // namespace

NiceReport check_nice(const CylinderField& f, double tol) {
    NiceReport rep;
    auto rows = f.support_rows();
    if (!rows) {
        rep.violations.push_back("field is identically zero");
        return rep;
    }
    int j_lo = rows->first, j_hi = rows->second;
    const GridSpec& g = f.spec;

    // q-independent collars measured inward from both support edges
    auto row_q_independent = [&](int j) {
        double lo = f.at(0, j), hi = lo;
        for (int i = 1; i < g.nq; ++i) {
            double v = f.at(i, j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo <= tol;
    };
    int collar_lo = 0;
    for (int j = j_lo; j <= j_hi && row_q_independent(j); ++j) ++collar_lo;
    int collar_hi = 0;
    for (int j = j_hi; j >= j_lo && row_q_independent(j); --j) ++collar_hi;
    if (collar_lo >= j_hi - j_lo + 1) {
        // fully q-independent field: degenerate critical circles
        rep.violations.push_back("field is q-independent, every critical level is a circle");
    }
    if (collar_lo < 2)
        rep.violations.push_back("lower support collar is q-dependent (width " +
                                 std::to_string(collar_lo) + " rows, need 2)");
    if (collar_hi < 2)
        rep.violations.push_back("upper support collar is q-dependent (width " +
                                 std::to_string(collar_hi) + " rows, need 2)");
    rep.delta = std::min(collar_lo, collar_hi) * g.dp();

    // discrete critical cells by 8-neighbor sign transitions under the
    // symbolic (value, index) order; ring order is counterclockwise
    static const int ring_di[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static const int ring_dj[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    int j_min = std::max(1, j_lo);
    int j_max = std::min(g.np - 2, j_hi);
    for (int i = 0; i < g.nq; ++i) {
        for (int j = j_min; j <= j_max; ++j) {
            double v = f.at(i, j);
            long idx = static_cast<long>(g.index(i, j));
            bool greater[8];
            for (int k = 0; k < 8; ++k) {
                int ni = (i + ring_di[k] + g.nq) % g.nq;
                int nj = j + ring_dj[k];
                double nv = f.at(ni, nj);
                greater[k] = symb_less(v, idx, nv, static_cast<long>(g.index(ni, nj)));
            }
            int transitions = 0;
            for (int k = 0; k < 8; ++k)
                if (greater[k] != greater[(k + 1) % 8]) ++transitions;
            NiceReport::CriticalCell cc;
            cc.i = i;
            cc.j = j;
            cc.value = v;
            if (transitions == 0) {
                cc.type = greater[0] ? NiceReport::CriticalCell::Type::minimum
                                     : NiceReport::CriticalCell::Type::maximum;
            } else if (transitions >= 4) {
                cc.type = NiceReport::CriticalCell::Type::saddle;
                if (transitions >= 6)
                    rep.violations.push_back("degenerate saddle at cell (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
            } else {
                continue; // regular
            }
            // a critical cell whose whole row is locally flat marks a
            // degenerate critical circle rather than a Morse point
            double left = f.at((i + g.nq - 1) % g.nq, j);
            double right = f.at((i + 1) % g.nq, j);
            if (std::fabs(left - v) <= tol && std::fabs(right - v) <= tol)
                rep.violations.push_back("degenerate critical circle through cell (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            if (j - j_lo < collar_lo || j_hi - j < collar_hi)
                rep.violations.push_back("critical cell (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") lies in a support collar");
            rep.critical_cells.push_back(cc);
        }
    }

    // pairwise distinct critical values beyond tol
    std::vector<double> vals;
    vals.reserve(rep.critical_cells.size());
    for (const auto& c : rep.critical_cells) vals.push_back(c.value);
    std::sort(vals.begin(), vals.end());
    for (std::size_t k = 1; k < vals.size(); ++k) {
        if (vals[k] - vals[k - 1] <= tol) {
            rep.violations.push_back("critical values collide: " + std::to_string(vals[k - 1]) +
                                     " and " + std::to_string(vals[k]));
        }
    }

    rep.is_nice = rep.violations.empty();
    return rep;
}

std::pair<CylinderField, CylinderField> pos_neg_split(const CylinderField& f) {
    CylinderField plus = f, minus = f;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        double v = f.values[k];
        plus.values[k] = v > 0 ? v : 0;
        minus.values[k] = v < 0 ? -v : 0;
    }
    return {plus, minus};
}

CylinderField field_scale(const CylinderField& f, double s) {
    CylinderField out = f;
    for (auto& v : out.values) v *= s;
    return out;
}

CylinderField field_add(const CylinderField& a, const CylinderField& b) {
    if (!(a.spec == b.spec)) throw domain_error("field addition requires identical grids");
    CylinderField out = a;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
    return out;
}

} // namespace symh
