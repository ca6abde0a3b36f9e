#include "symh/compare.hpp"

#include "symh/errors.hpp"
#include "symh/expression.hpp"
#include "symh/homog.hpp"
#include "symh/io.hpp"
#include "symh/tmeasure.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace symh {

void ExperimentConfig::validate() const {
    grid.validate();
    if (grid.space != Space::cylinder)
        throw domain_error("the comparison experiment runs on a cylinder grid");
    if (grid.p_min != -0.5 || grid.p_max != 0.5)
        throw domain_error("the comparison grid must span the full window [-1/2, 1/2]");
    if (!(r > 0 && r <= 0.5)) throw domain_error("r must lie in (0, 1/2]");
    if (std::fabs(r - 0.25) < grid.dp())
        throw domain_error("r is within one cell of the threshold 1/4; the verdict "
                           "would depend on grid jitter");
    if (corpus_size < 1) throw domain_error("corpus size must be positive");
    if (n_levels < 64) throw domain_error("the level quadrature needs at least 64 strata");
    if (!(match_tol > 0) || !(mismatch_margin > 0))
        throw domain_error("tolerances must be positive");
    if (!(mollification > 0)) throw domain_error("mollification must be positive");
    if (threads < 1) throw domain_error("thread count must be positive");
}

namespace {

// fixed-width uniform draw so corpora are identical across platforms
struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t s) : g(s) {}
    double uniform(double a, double b) {
        double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }
};

double wrapped_bump_q(double q, double q0, double rq) {
    double d = q - q0;
    d -= std::floor(d + 0.5);
    return bump_profile(d, 0.0, rq);
}

CylinderField sample_on(const GridSpec& g, const std::function<double(double, double)>& fn) {
    CylinderField f;
    f.spec = g;
    f.values.resize(g.cells());
    for (int i = 0; i < g.nq; ++i) {
        double q = g.q_center(i);
        for (int j = 0; j < g.np; ++j) f.values[g.index(i, j)] = fn(q, g.p_center(j));
    }
    return f;
}

CorpusField make_corpus_field(const ExperimentConfig& cfg, int id) {
    Rng rng(cfg.seed ^ (static_cast<std::uint64_t>(id) * 0x9e3779b97f4a7c15ULL));
    const double r = cfg.r;
    CorpusField out;
    out.id = id;
    switch (id % 4) {
    case 0: {
        out.kind = "band";
        double h = rng.uniform(0.4, 1.0) * (rng.uniform(0.0, 1.0) < 0.35 ? -1.0 : 1.0);
        double c = rng.uniform(-0.45 * r, 0.45 * r);
        double w = std::min(rng.uniform(0.3 * r, 0.5 * r), 0.9 * r - std::fabs(c));
        out.field = sample_on(cfg.grid, [=](double, double p) {
            return h * bump_profile(p, c, w);
        });
        break;
    }
    case 1: {
        out.kind = "disk_band";
        double q0 = rng.uniform(0.0, 1.0);
        double p0 = rng.uniform(-0.4 * r, 0.4 * r);
        double rq = rng.uniform(0.15, 0.3);
        double rp = std::min(rng.uniform(0.3 * r, 0.5 * r), 0.9 * r - std::fabs(p0));
        double h1 = rng.uniform(0.5, 1.0);
        double h2 = rng.uniform(0.15, 0.35);
        double c2 = rng.uniform(-0.3 * r, 0.3 * r);
        double w2 = std::min(rng.uniform(0.35 * r, 0.6 * r), 0.9 * r - std::fabs(c2));
        out.field = sample_on(cfg.grid, [=](double q, double p) {
            return h1 * wrapped_bump_q(q, q0, rq) * bump_profile(p, p0, rp) +
                   h2 * bump_profile(p, c2, w2);
        });
        break;
    }
    case 2: {
        out.kind = "annulus";
        double h = rng.uniform(0.3, 1.0);
        double c = rng.uniform(-0.35 * r, 0.35 * r);
        double hw = rng.uniform(0.15 * r, 0.3 * r);
        double taper = rng.uniform(0.1 * r, 0.2 * r);
        double room = 0.9 * r - std::fabs(c);
        if (hw + taper > room) {
            double scale = room / (hw + taper);
            hw *= scale;
            taper *= scale;
        }
        out.field = sample_on(cfg.grid, [=](double, double p) {
            return h * plateau_profile(p, c, hw, taper);
        });
        break;
    }
    default: {
        out.kind = "two_lobe";
        double d = rng.uniform(0.5 * r, 0.8 * r);
        double mid = rng.uniform(-0.1 * r, 0.1 * r);
        double c1 = mid - 0.5 * d;
        double c2 = mid + 0.5 * d;
        double w1 = rng.uniform(0.6, 0.85) * d;
        double w2 = rng.uniform(0.6, 0.85) * d;
        double lo = c1 - w1, hi = c2 + w2;
        if (lo < -0.9 * r || hi > 0.9 * r) {
            double scale = std::min((c1 + 0.9 * r) / w1, (0.9 * r - c2) / w2);
            w1 *= scale;
            w2 *= scale;
        }
        double h1 = rng.uniform(0.5, 1.0);
        double h2 = rng.uniform(0.5, 1.0);
        out.field = sample_on(cfg.grid, [=](double, double p) {
            return h1 * bump_profile(p, c1, w1) + h2 * bump_profile(p, c2, w2);
        });
        break;
    }
    }
    return out;
}

} // namespace

CylinderField embed_field(const CylinderField& f, double r) {
    f.spec.validate();
    if (f.spec.space != Space::cylinder)
        throw domain_error("only cylinder fields embed into the sphere");
    if (f.spec.p_min != -0.5 || f.spec.p_max != 0.5)
        throw domain_error("embedding expects the field sampled on the full window "
                           "[-1/2, 1/2]; resample before embedding");
    if (!(r > 0 && r <= 0.5)) throw domain_error("r must lie in (0, 1/2]");
    auto band = f.support_band();
    if (band && (band->first <= -r + 1e-15 || band->second >= r - 1e-15))
        throw domain_error("support exceeds the open band |p| < " + format_double(r));
    CylinderField out = f;
    out.spec.space = Space::sphere;
    return out;
}

double zeta_r(const CylinderField& f, double r, int n_levels, int threads) {
    TauCalabi tau;
    return quasi_integral(tau, embed_field(f, r), n_levels, threads);
}

std::vector<CorpusField> comparison_corpus(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<CorpusField> out;
    out.reserve(static_cast<std::size_t>(cfg.corpus_size));
    for (int id = 0; id < cfg.corpus_size; ++id) out.push_back(make_corpus_field(cfg, id));
    return out;
}

ComparisonReport run_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    ComparisonReport rep;
    rep.cfg = cfg;
    for (const CorpusField& cf : comparison_corpus(cfg)) {
        FieldComparison fc;
        fc.id = cf.id;
        fc.kind = cf.kind;
        fc.eta0 = eta(cf.field, 0.0, cfg.mollification, cfg.threads);
        fc.zeta_r = zeta_r(cf.field, cfg.r, cfg.n_levels, cfg.threads);
        fc.gap = std::fabs(fc.zeta_r - fc.eta0);
        rep.per_field.push_back(fc);
    }
    double max_gap = 0;
    for (const FieldComparison& fc : rep.per_field) max_gap = std::max(max_gap, fc.gap);
    if (cfg.r <= 0.25) {
        rep.verdict = max_gap <= cfg.match_tol ? "match" : "mismatch";
        return rep;
    }
    CylinderField ce = counterexample_field(cfg.r, cfg.grid);
    FieldComparison fc;
    fc.id = -1;
    fc.kind = "plateau_disk";
    fc.eta0 = eta(ce, 0.0, cfg.mollification, cfg.threads);
    fc.zeta_r = zeta_r(ce, cfg.r, cfg.n_levels, cfg.threads);
    fc.gap = fc.zeta_r - fc.eta0;
    rep.has_counterexample = true;
    rep.counterexample = fc;
    rep.verdict = fc.gap >= cfg.mismatch_margin ? "mismatch" : "inconclusive";
    return rep;
}

CylinderField counterexample_field(double r, const GridSpec& spec) {
    spec.validate();
    if (spec.space != Space::cylinder || spec.p_min != -0.5 || spec.p_max != 0.5)
        throw domain_error("the counterexample lives on the full cylinder window");
    if (!(r > 0.25 && r <= 0.5))
        throw domain_error("a dominating plateau needs r > 1/4");
    double dq = spec.dq();
    double dp = spec.dp();
    double taper_q = 4 * dq;
    double taper_p = 4 * dp;
    double hwq = 0.5 - dq - taper_q;
    double hwp_max = r - 2 * dp - taper_p;
    if (hwq <= 0 || hwp_max <= 0)
        throw domain_error("grid too coarse for the plateau taper");
    double a_max = 4 * hwq * hwp_max;
    double target = std::min(0.5 * (0.5 + 2 * r), 0.98 * a_max);
    if (target <= 0.5 + 2 * spec.cell_area())
        throw domain_error("no room for a plateau of area above 1/2 inside the band "
                           "|p| < " + format_double(r) + " at this resolution");
    double hwp = target / (4 * hwq);
    return sample_on(spec, [=](double q, double p) {
        return plateau_profile(q, 0.5, hwq, taper_q) * plateau_profile(p, 0.0, hwp, taper_p);
    });
}

MomentPullbackReport moment_pullback_check(const std::function<double(double)>& gbar,
                                           double r, double p0, const GridSpec& grid,
                                           int n_levels, double mollification,
                                           int threads) {
    CylinderField f = sample_on(grid, [&](double, double p) { return gbar(p); });
    MomentPullbackReport rep;
    rep.gbar_value = gbar(p0);
    rep.gbar_at_0 = gbar(0.0);
    rep.eta_value = eta(f, p0, mollification, threads);
    rep.zeta_value = zeta_r(f, r, n_levels, threads);
    rep.dev_eta = std::fabs(rep.eta_value - rep.gbar_value);
    rep.dev_zeta = std::fabs(rep.zeta_value - rep.gbar_at_0);
    return rep;
}

Gamma0Params solve_gamma0(int n, double epsilon, double rho2, double alpha) {
    if (n < 2) throw domain_error("n must be at least 2");
    if (!(epsilon > 0)) throw domain_error("epsilon must be positive");
    double s = 1.0 / (n + 1);
    double r2sq = rho2 * rho2;
    if (!(r2sq > s && r2sq < s + epsilon))
        throw domain_error("rho2^2 must lie in (1/(n+1), 1/(n+1) + epsilon)");
    if (!(alpha > 0 && alpha < M_PI / 2))
        throw domain_error("alpha must lie in (0, pi/2)");
    double a = alpha / M_PI;
    double r1sq = ((1 - a) * (r2sq - s) - a * s) / (1 - a);
    if (!(r1sq > 0)) {
        double bound = M_PI * (1.0 - s / r2sq);
        throw domain_error("alpha too large for this rho2; the area balance needs "
                           "alpha < " + format_double(bound));
    }
    Gamma0Params gp;
    gp.n = n;
    gp.epsilon = epsilon;
    gp.rho2 = rho2;
    gp.alpha = alpha;
    gp.rho1 = std::sqrt(r1sq);
    gp.residual = std::fabs((1 - a) * (r2sq - s) - (r1sq + a * (s - r1sq)));
    gp.curve_area_dev = std::fabs(polygon_area(gamma0_curve(gp)) - M_PI * s);
    return gp;
}

std::vector<std::pair<double, double>> gamma0_curve(const Gamma0Params& gp,
                                                    int samples_per_arc) {
    if (samples_per_arc < 2) throw domain_error("curve sampling needs at least 2 points per arc");
    int m = samples_per_arc;
    std::vector<std::pair<double, double>> poly;
    poly.reserve(static_cast<std::size_t>(4) * m);
    double a0 = gp.alpha;
    double a1 = 2 * M_PI - gp.alpha;
    for (int k = 0; k < m; ++k) {
        double th = a0 + (a1 - a0) * k / m;
        poly.emplace_back(gp.rho2 * std::cos(th), gp.rho2 * std::sin(th));
    }
    for (int k = 0; k < m; ++k) {
        double rho = gp.rho2 + (gp.rho1 - gp.rho2) * static_cast<double>(k) / m;
        poly.emplace_back(rho * std::cos(a1), rho * std::sin(a1));
    }
    for (int k = 0; k < m; ++k) {
        double th = a1 - (a1 - a0) * k / m;
        poly.emplace_back(gp.rho1 * std::cos(th), gp.rho1 * std::sin(th));
    }
    for (int k = 0; k < m; ++k) {
        double rho = gp.rho1 + (gp.rho2 - gp.rho1) * static_cast<double>(k) / m;
        poly.emplace_back(rho * std::cos(a0), rho * std::sin(a0));
    }
    return poly;
}

double polygon_area(const std::vector<std::pair<double, double>>& poly) {
    double s = 0;
    std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = poly[k];
        const auto& b = poly[(k + 1) % n];
        s += a.first * b.second - b.first * a.second;
    }
    return 0.5 * s;
}

std::string ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json c;
    c["r"] = quantize12(cfg.r);
    c["grid"] = {{"nq", cfg.grid.nq}, {"np", cfg.grid.np}};
    c["corpus_size"] = cfg.corpus_size;
    c["seed"] = cfg.seed;
    c["n_levels"] = cfg.n_levels;
    c["match_tol"] = quantize12(cfg.match_tol);
    c["mismatch_margin"] = quantize12(cfg.mismatch_margin);
    c["mollification"] = quantize12(cfg.mollification);
    j["config"] = c;
    nlohmann::ordered_json pf = nlohmann::ordered_json::array();
    for (const FieldComparison& fc : per_field) {
        nlohmann::ordered_json e;
        e["id"] = fc.id;
        e["kind"] = fc.kind;
        e["zeta_r"] = quantize12(fc.zeta_r);
        e["eta0"] = quantize12(fc.eta0);
        e["gap"] = quantize12(fc.gap);
        pf.push_back(e);
    }
    j["per_field"] = pf;
    j["verdict"] = verdict;
    if (has_counterexample) {
        nlohmann::ordered_json e;
        e["kind"] = counterexample.kind;
        e["zeta_r"] = quantize12(counterexample.zeta_r);
        e["eta0"] = quantize12(counterexample.eta0);
        e["gap"] = quantize12(counterexample.gap);
        j["counterexample"] = e;
    } else {
        j["counterexample"] = nullptr;
    }
    return j.dump(2);
}

} // namespace symh
