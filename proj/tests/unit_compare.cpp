#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "symh/compare.hpp"
#include "symh/errors.hpp"
#include "symh/field.hpp"
#include "symh/homog.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace symh;

namespace {

constexpr double kPi = std::numbers::pi;
const GridSpec kGrid{128, 128, -0.5, 0.5, Space::cylinder};

template <typename Fn>
CylinderField profile_field(const GridSpec& gs, Fn&& phi) {
    CylinderField f{gs, std::vector<double>(gs.cells(), 0.0)};
    for (int j = 0; j < gs.np; ++j) {
        double v = phi(gs.p_center(j));
        for (int i = 0; i < gs.nq; ++i) f.at(i, j) = v;
    }
    return f;
}

} // namespace

TEST_CASE("embedding into the sphere is the identity on cells") {
    CylinderField f = profile_field(kGrid, [](double p) { return bump_profile(p, 0.0, 0.12); });
    CylinderField g = embed_field(f, 0.2);
    CHECK(g.spec.space == Space::sphere);
    CHECK(g.spec.nq == kGrid.nq);
    CHECK(g.spec.np == kGrid.np);
    CHECK(g.values == f.values);
    CHECK(g.grid_integral() == doctest::Approx(f.grid_integral()).epsilon(1e-12));

    // support must stay strictly inside |p| < r
    CHECK_THROWS_AS(embed_field(f, 0.1), domain_error);
    GridSpec narrow{128, 128, -0.4, 0.4, Space::cylinder};
    CylinderField h = profile_field(narrow, [](double p) { return bump_profile(p, 0.0, 0.1); });
    CHECK_THROWS_AS(embed_field(h, 0.2), domain_error);
}

TEST_CASE("calabi quasi-state of a thin band reaches the band height") {
    CylinderField f = profile_field(kGrid, [](double p) { return bump_profile(p, 0.0, 0.12); });
    double z = zeta_r(f, 0.2, 512);
    CHECK(std::fabs(z - f.max_value()) <= 5e-3);
    CHECK(std::fabs(z - eta_oracle(f, 0.0, 512)) <= 5e-3);
}

TEST_CASE("counterexample plateau separates the two functionals") {
    CylinderField cf = counterexample_field(0.35, kGrid);
    CHECK(cf.max_value() == 1.0);
    auto band = cf.support_band();
    REQUIRE(band.has_value());
    CHECK(band->first > -0.35);
    CHECK(band->second < 0.35);

    CHECK(eta(cf, 0.0) <= 5e-2);
    CHECK(zeta_r(cf, 0.35, 512) >= 0.95);

    // at this resolution a plateau of area above 1/2 does not fit in r = 0.3
    CHECK_THROWS_AS(counterexample_field(0.30, kGrid), domain_error);
    CHECK_THROWS_AS(counterexample_field(0.2, kGrid), domain_error);
}

TEST_CASE("corpus generation is seeded, layered and support bounded") {
    ExperimentConfig cfg;
    cfg.r = 0.2;
    cfg.grid = kGrid;
    cfg.corpus_size = 8;
    cfg.seed = 7;
    std::vector<CorpusField> corpus = comparison_corpus(cfg);
    REQUIRE(corpus.size() == 8);
    const char* kinds[] = {"band", "disk_band", "annulus", "two_lobe"};
    for (int k = 0; k < 8; ++k) {
        CHECK(corpus[k].id == k);
        CHECK(corpus[k].kind == kinds[k % 4]);
        auto band = corpus[k].field.support_band();
        REQUIRE(band.has_value());
        CHECK(band->first > -cfg.r);
        CHECK(band->second < cfg.r);
    }

    std::vector<CorpusField> again = comparison_corpus(cfg);
    for (int k = 0; k < 8; ++k) CHECK(corpus[k].field.values == again[k].field.values);

    ExperimentConfig other = cfg;
    other.seed = 8;
    std::vector<CorpusField> moved = comparison_corpus(other);
    bool any_diff = false;
    for (int k = 0; k < 8; ++k) any_diff = any_diff || corpus[k].field.values != moved[k].field.values;
    CHECK(any_diff);
}

TEST_CASE("experiment verdicts flip across the quarter threshold") {
    ExperimentConfig cfg;
    cfg.r = 0.2;
    cfg.grid = kGrid;
    cfg.corpus_size = 4;
    cfg.seed = 11;
    cfg.n_levels = 256;
    cfg.threads = 2;
    ComparisonReport rep = run_comparison(cfg);
    CHECK(rep.verdict == "match");
    CHECK_FALSE(rep.has_counterexample);
    REQUIRE(rep.per_field.size() == 4);
    for (const auto& fc : rep.per_field) {
        CHECK(std::fabs(fc.gap) <= cfg.match_tol);
        CHECK(fc.gap == doctest::Approx(std::fabs(fc.zeta_r - fc.eta0)).epsilon(1e-12));
    }

    nlohmann::json j = nlohmann::json::parse(rep.to_json());
    CHECK(j["verdict"] == "match");
    REQUIRE(j["per_field"].is_array());
    CHECK(j["per_field"].size() == 4);
    for (const auto& e : j["per_field"]) {
        CHECK(e.contains("kind"));
        CHECK(e.contains("zeta_r"));
        CHECK(e.contains("eta0"));
    }

    ExperimentConfig high = cfg;
    high.r = 0.35;
    ComparisonReport rep2 = run_comparison(high);
    CHECK(rep2.verdict == "mismatch");
    CHECK(rep2.has_counterexample);
    CHECK(rep2.counterexample.zeta_r >= 0.95);
    CHECK(rep2.counterexample.eta0 <= 5e-2);
    CHECK(rep2.counterexample.kind == "plateau_disk");
}

TEST_CASE("experiment configuration is validated") {
    ExperimentConfig cfg;
    cfg.grid = kGrid;
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig near = cfg;
    near.r = 0.25 + 0.5 * kGrid.dp();
    CHECK_THROWS_AS(near.validate(), domain_error);

    ExperimentConfig sphere_grid = cfg;
    sphere_grid.grid.space = Space::sphere;
    CHECK_THROWS_AS(sphere_grid.validate(), domain_error);

    ExperimentConfig narrow = cfg;
    narrow.grid.p_min = -0.4;
    CHECK_THROWS_AS(narrow.validate(), domain_error);

    ExperimentConfig none = cfg;
    none.corpus_size = 0;
    CHECK_THROWS_AS(none.validate(), domain_error);

    ExperimentConfig coarse = cfg;
    coarse.n_levels = 32;
    CHECK_THROWS_AS(coarse.validate(), domain_error);
}

TEST_CASE("moment map pullbacks collapse to the profile values") {
    auto gbar = [](double p) { return bump_profile(p, 0.0, 0.15); };
    MomentPullbackReport rep = moment_pullback_check(gbar, 0.2, 0.05, kGrid, 512);
    CHECK(rep.gbar_at_0 == 1.0);
    CHECK(rep.gbar_value == gbar(0.05));
    CHECK(rep.dev_eta <= 5e-2);
    CHECK(rep.dev_zeta <= 5e-2);
    CHECK(rep.dev_eta == doctest::Approx(std::fabs(rep.eta_value - rep.gbar_value)).epsilon(1e-12));
    CHECK(rep.dev_zeta == doctest::Approx(std::fabs(rep.zeta_value - rep.gbar_at_0)).epsilon(1e-12));
}

TEST_CASE("sector parameter solver balances the annulus areas") {
    double s = 1.0 / 3;
    double rho2 = std::sqrt(s + 0.045);
    Gamma0Params gp = solve_gamma0(2, 0.05, rho2, 0.3);
    CHECK(gp.n == 2);
    CHECK(gp.alpha == 0.3);
    CHECK(gp.rho2 == rho2);
    CHECK(gp.residual <= 1e-12);
    CHECK(gp.curve_area_dev <= 1e-6);
    CHECK(gp.rho1 > 0.0);
    CHECK(gp.rho1 < gp.rho2);

    // the defining balance: the outer sector complement equals the inner
    // disk part weighted by the opening
    double a = gp.alpha / kPi;
    double lhs = (1 - a) * (gp.rho2 * gp.rho2 - s);
    double rhs = gp.rho1 * gp.rho1 + a * (s - gp.rho1 * gp.rho1);
    CHECK(std::fabs(lhs - rhs) <= 1e-12);

    // vanishing opening angle pushes the inner radius to the area complement
    Gamma0Params lim = solve_gamma0(2, 0.05, rho2, 1e-9);
    CHECK(std::fabs(lim.rho1 * lim.rho1 - (rho2 * rho2 - s)) <= 1e-8);

    // the sampled curve encloses exactly the reference disk area
    auto poly = gamma0_curve(gp, 20000);
    CHECK(std::fabs(polygon_area(poly) - kPi / 3) <= 1e-6);
}

TEST_CASE("sector parameter solver rejects out-of-range inputs") {
    double s = 1.0 / 3;
    CHECK_THROWS_AS(solve_gamma0(1, 0.05, 0.6, 0.3), domain_error);
    CHECK_THROWS_AS(solve_gamma0(2, -0.01, 0.6, 0.3), domain_error);
    CHECK_THROWS_AS(solve_gamma0(2, 0.05, std::sqrt(s) - 0.01, 0.3), domain_error);
    CHECK_THROWS_AS(solve_gamma0(2, 0.05, std::sqrt(s + 0.06), 0.3), domain_error);
    CHECK_THROWS_AS(solve_gamma0(2, 0.05, std::sqrt(s + 0.045), 1.6), domain_error);
    // within range but violating the feasibility bound for alpha
    CHECK_THROWS_AS(solve_gamma0(2, 0.05, 0.6, 0.8), domain_error);
}

TEST_CASE("shoelace area on simple polygons") {
    std::vector<std::pair<double, double>> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(polygon_area(square) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<std::pair<double, double>> tri = {{0, 0}, {2, 0}, {0, 3}};
    CHECK(polygon_area(tri) == doctest::Approx(3.0).epsilon(1e-15));
}
