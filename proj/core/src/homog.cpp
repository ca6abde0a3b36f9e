#include "symh/homog.hpp"

#include "symh/contour.hpp"
#include "symh/errors.hpp"
#include "symh/expression.hpp"
#include "symh/parallel.hpp"
#include "symh/reeb.hpp"
#include "symh/tmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace symh {

double HomogenizedProfile::eval(double p) const {
    if (p_samples.empty() || p <= p_lo || p >= p_hi) return 0.0;
    auto it = std::upper_bound(p_samples.begin(), p_samples.end(), p);
    if (it == p_samples.begin()) return values.front();
    if (it == p_samples.end()) return values.back();
    std::size_t k = static_cast<std::size_t>(it - p_samples.begin());
    double p1 = p_samples[k - 1];
    double p2 = p_samples[k];
    if (p2 <= p1) return values[k - 1];
    double s = (p - p1) / (p2 - p1);
    return values[k - 1] * (1.0 - s) + values[k] * s;
}

double HomogenizedProfile::max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

double HomogenizedProfile::min_value() const {
    double m = 0.0;
    for (double v : values) m = std::min(m, v);
    return m;
}

namespace {

HomogenizedProfile zero_profile(const GridSpec& spec) {
    HomogenizedProfile h;
    h.p_lo = h.p_hi = 0.0;
    h.p_samples.reserve(static_cast<std::size_t>(spec.np));
    for (int j = 0; j < spec.np; ++j) h.p_samples.push_back(spec.p_center(j));
    h.values.assign(h.p_samples.size(), 0.0);
    return h;
}

HomogenizedProfile profile_from_path(const LabeledPath& lp, const GridSpec& spec) {
    HomogenizedProfile h;
    h.p_lo = lp.p_prime;
    h.p_hi = lp.p_dprime;

    std::vector<std::pair<double, double>> pts;
    pts.reserve(lp.points.size() + 2);
    for (const LabeledPoint& pt : lp.points) {
        switch (pt.kind) {
        case LabeledPoint::Kind::terminal_minus:
            pts.emplace_back(lp.p_prime, 0.0);
            break;
        case LabeledPoint::Kind::terminal_plus:
            pts.emplace_back(lp.p_dprime, 0.0);
            break;
        case LabeledPoint::Kind::edge:
            pts.emplace_back(pt.label_lo, pt.f_value);
            break;
        case LabeledPoint::Kind::vertex:
            pts.emplace_back(pt.label_lo, pt.f_value);
            if (pt.label_hi > pt.label_lo) pts.emplace_back(pt.label_hi, pt.f_value);
            break;
        }
    }

    auto interp = [&pts](double p) {
        auto cmp = [](const std::pair<double, double>& a, double b) { return a.first < b; };
        auto it = std::lower_bound(pts.begin(), pts.end(), p, cmp);
        if (it == pts.begin()) return it->second;
        if (it == pts.end()) return pts.back().second;
        auto prev = it - 1;
        if (it->first <= prev->first) return prev->second;
        double s = (p - prev->first) / (it->first - prev->first);
        return prev->second * (1.0 - s) + it->second * s;
    };

    // merge the grid's row centers into the sample set so emitted profiles
    // are regular; rows outside the support band carry exact zeros
    std::vector<std::pair<double, double>> rows;
    rows.reserve(static_cast<std::size_t>(spec.np));
    for (int j = 0; j < spec.np; ++j) {
        double p = spec.p_center(j);
        if (p <= h.p_lo || p >= h.p_hi)
            rows.emplace_back(p, 0.0);
        else
            rows.emplace_back(p, interp(p));
    }

    std::vector<std::pair<double, double>> merged;
    merged.reserve(pts.size() + rows.size());
    std::size_t a = 0, b = 0;
    while (a < pts.size() || b < rows.size()) {
        bool take_row = a == pts.size() || (b < rows.size() && rows[b].first < pts[a].first);
        if (take_row) {
            if ((merged.empty() || std::fabs(merged.back().first - rows[b].first) > 1e-12) &&
                (a == pts.size() || std::fabs(pts[a].first - rows[b].first) > 1e-12))
                merged.push_back(rows[b]);
            ++b;
        } else {
            merged.push_back(pts[a]);
            ++a;
        }
    }

    h.p_samples.reserve(merged.size());
    h.values.reserve(merged.size());
    for (const auto& m : merged) {
        h.p_samples.push_back(m.first);
        h.values.push_back(m.second);
    }
    return h;
}

} // namespace

HomogenizedProfile homogenize(const CylinderField& f, int threads) {
    ReebGraph g = build_reeb(f);
    std::vector<int> path = gamma0_path(g);
    LabeledPath lp = label_path(g, path, f, 16, threads);
    return profile_from_path(lp, f.spec);
}

CylinderField nice_perturbation(const CylinderField& f, double eps, int attempt) {
    static const double phases[] = {0.0, 1.317, 2.71};
    int a = ((attempt % 3) + 3) % 3;
    double phase = phases[a];
    auto rows = f.support_rows();
    if (!rows) throw domain_error("cannot perturb the zero field");
    const GridSpec& g = f.spec;
    int jlo = rows->first, jhi = rows->second;
    if (jlo - 4 < 0 || jhi + 4 > g.np - 1)
        throw domain_error("support too close to the grid boundary to widen by the "
                           "perturbation collar");
    double dp = g.dp();
    // the perturbation band extends the support by three rows on each side;
    // its envelope is a bump strictly positive at every extended row center
    double lo_p = g.p_center(jlo - 3) - 0.6 * dp;
    double hi_p = g.p_center(jhi + 3) + 0.6 * dp;
    double mid = 0.5 * (lo_p + hi_p);
    double half = 0.5 * (hi_p - lo_p);

    // the envelope follows the field's sign on each outermost support row
    // pair, so the widened flank continues the field instead of folding it
    // back through zero and raising a spurious extremal circle
    auto edge_sign = [&](int j0, int j1) {
        double s = 0;
        for (int j : {j0, j1})
            for (int i = 0; i < g.nq; ++i) s += f.at(i, j);
        return s < 0 ? -1.0 : 1.0;
    };
    double s_lo = edge_sign(jlo, std::min(jlo + 1, jhi));
    double s_hi = edge_sign(std::max(jhi - 1, jlo), jhi);
    // differing edge signs flip the envelope across a smooth interior
    // window; the window slides with the attempt so a critical circle of
    // the field sitting at the sign change is missed at most once
    double win_lo = 0.35 + 0.1 * a;
    double win_hi = win_lo + 0.2;

    CylinderField pert;
    pert.spec = g;
    pert.values.assign(g.cells(), 0.0);
    double raw_max = 0.0;
    for (int j = 0; j < g.np; ++j) {
        double p = g.p_center(j);
        double w = bump_profile(p, mid, half);
        if (w == 0.0) continue;
        // a linear skew keeps the envelope positive but never symmetric
        // about the band center, so a mirror-symmetric field cannot keep
        // equal critical values on mirror rows
        w *= 1.0 + 0.3 * (p - mid) / half;
        double sigma = s_lo;
        if (s_lo != s_hi) {
            double u = ((p - lo_p) / (hi_p - lo_p) - win_lo) / (win_hi - win_lo);
            sigma = s_lo + (s_hi - s_lo) * smoothstep01(u);
        }
        // the three rows nearest each band edge stay q-independent so the
        // perturbed field keeps its collars
        double d = std::min(p - lo_p, hi_p - p);
        double chi = smoothstep01((d - 3.5 * dp) / (6.5 * dp));
        for (int i = 0; i < g.nq; ++i) {
            double q = g.q_center(i);
            double mix = std::cos(2 * M_PI * q + phase) +
                         0.37 * std::sin(4 * M_PI * q + 1.1 + phase);
            double v = w * sigma * (1.0 + 0.45 * chi * mix);
            pert.values[g.index(i, j)] = v;
            raw_max = std::max(raw_max, std::fabs(v));
        }
    }
    if (raw_max <= 0) throw domain_error("degenerate perturbation envelope");
    return field_scale(pert, eps / raw_max);
}

HomogenizedProfile homogenize_general(const CylinderField& f, double mollification,
                                      int threads) {
    if (!(mollification > 0)) throw domain_error("mollification must be positive");
    if (!f.support_rows()) return zero_profile(f.spec);
    if (check_nice(f).is_nice) return homogenize(f, threads);
    std::string last;
    for (int attempt = 0; attempt < 3; ++attempt) {
        CylinderField g = field_add(f, nice_perturbation(f, mollification, attempt));
        NiceReport rep = check_nice(g);
        if (rep.is_nice) return homogenize(g, threads);
        if (!rep.violations.empty()) last = rep.violations.front();
    }
    throw domain_error("mollification failed to reach a generic field at this resolution"
                       + (last.empty() ? std::string() : "; last obstruction: " + last));
}

double eta(const CylinderField& f, double p0, double mollification, int threads) {
    return homogenize_general(f, mollification, threads).eval(p0);
}

double eta_oracle(const CylinderField& f, double p0, int n_levels, int threads) {
    if (n_levels < 64) throw domain_error("the level quadrature needs at least 64 strata");
    return quasi_integral(TauP0(p0), f, n_levels, threads);
}

EtaOracle::Part EtaOracle::build_part(const CylinderField& g, int n_levels, int threads) {
    Part part;
    double mx = g.max_value();
    if (mx <= 0) return part;
    part.dt = mx / n_levels;
    auto sh = std::make_shared<const CylinderField>(g);
    part.strata = parallel_blocks<std::vector<std::array<double, 2>>>(
        static_cast<std::size_t>(n_levels), 8, threads, [&](std::size_t k) {
            double t = (static_cast<double>(k) + 0.5) * part.dt;
            return essential_boundary_intervals(superlevel_region(sh, t));
        });
    return part;
}

double EtaOracle::eval_part(const Part& part, double p0) {
    if (part.strata.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& intervals : part.strata)
        for (const auto& iv : intervals)
            if (iv[0] <= p0 && p0 <= iv[1]) {
                sum += part.dt;
                break;
            }
    return sum;
}

EtaOracle::EtaOracle(const CylinderField& f, int n_levels, int threads) {
    if (n_levels < 64) throw domain_error("the level quadrature needs at least 64 strata");
    auto parts = pos_neg_split(f);
    pos_ = build_part(parts.first, n_levels, threads);
    neg_ = build_part(parts.second, n_levels, threads);
}

double EtaOracle::eval(double p0) const {
    return eval_part(pos_, p0) - eval_part(neg_, p0);
}

double eta_mu(const CylinderField& f, const RadonMeasure& mu, double mollification,
              int threads) {
    HomogenizedProfile h = homogenize_general(f, mollification, threads);
    double sum = 0.0;
    for (const RadonMeasure::Atom& a : mu.atoms) {
        if (!(a.weight >= 0)) throw domain_error("measure atom weights must be nonnegative");
        sum += a.weight * h.eval(a.p);
    }
    if (!mu.density.empty()) {
        if (mu.density.size() < 2)
            throw domain_error("a sampled density needs at least two samples");
        if (!(mu.density_p_max > mu.density_p_min))
            throw domain_error("density sample range is empty");
        std::size_t n = mu.density.size();
        double step = (mu.density_p_max - mu.density_p_min) / static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            double d = mu.density[k];
            if (!(d >= 0)) throw domain_error("density values must be nonnegative");
            double w = (k == 0 || k + 1 == n) ? 0.5 * step : step;
            sum += w * d * h.eval(mu.density_p_min + static_cast<double>(k) * step);
        }
    }
    return sum;
}

double c_plus(const CylinderField& f, double mollification, int threads) {
    return homogenize_general(f, mollification, threads).max_value();
}

double c_minus(const CylinderField& f, double mollification, int threads) {
    return homogenize_general(f, mollification, threads).min_value();
}

double c_plus_oracle(const CylinderField& f) {
    double mx = f.max_value();
    double mn = f.min_value();
    if (mx <= 0) return 0.0;
    auto sh = std::make_shared<const CylinderField>(f);
    auto essential_at = [&](double t) {
        for (const Contour& c : boundary_circles(superlevel_region(sh, t)))
            if (c.winding != 0) return true;
        return false;
    };
    if (essential_at(mx)) return mx;
    double lo = 0.0; // {f >= 0} always contains the far circles
    double hi = mx;
    double res = (mx - mn) / 16384.0;
    while (hi - lo > res) {
        double t = 0.5 * (lo + hi);
        if (essential_at(t))
            lo = t;
        else
            hi = t;
    }
    return lo;
}

double hofer_asymptotic(const CylinderField& f, double mollification, int threads) {
    HomogenizedProfile h = homogenize_general(f, mollification, threads);
    return h.max_value() - h.min_value();
}

} // namespace symh
