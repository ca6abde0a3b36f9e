#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symh/errors.hpp"
#include "symh/expression.hpp"
#include "symh/field.hpp"

#include <cmath>

using namespace symh;

namespace {

GridSpec cyl(int n) { return GridSpec{n, n, -0.5, 0.5, Space::cylinder}; }

CylinderField make(const GridSpec& g, double (*fn)(double, double)) {
    CylinderField f;
    f.spec = g;
    f.values.resize(g.cells());
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) f.at(i, j) = fn(g.q_center(i), g.p_center(j));
    return f;
}

} // namespace

TEST_CASE("grid geometry") {
    GridSpec g = cyl(8);
    CHECK(g.dq() == doctest::Approx(0.125));
    CHECK(g.dp() == doctest::Approx(0.125));
    CHECK(g.cell_area() == doctest::Approx(0.015625));
    CHECK(g.q_center(0) == doctest::Approx(0.0625));
    CHECK(g.p_center(0) == doctest::Approx(-0.4375));
    CHECK(g.p_edge(0) == doctest::Approx(-0.5));
    CHECK(g.p_edge(8) == doctest::Approx(0.5));
    CHECK(g.cells() == 64);

    GridSpec bad = g;
    bad.np = 0;
    CHECK_THROWS_AS(bad.validate(), domain_error);
    bad = g;
    bad.p_min = 0.5;
    bad.p_max = -0.5;
    CHECK_THROWS_AS(bad.validate(), domain_error);
}

TEST_CASE("support rows and band") {
    GridSpec g = cyl(16);
    CylinderField f;
    f.spec = g;
    f.values.assign(g.cells(), 0.0);
    CHECK(!f.support_rows());
    CHECK(!f.support_band());

    f.at(3, 5) = 0.25;
    f.at(9, 11) = -0.5;
    auto rows = f.support_rows();
    REQUIRE(rows);
    CHECK(rows->first == 5);
    CHECK(rows->second == 11);
    auto band = f.support_band();
    REQUIRE(band);
    CHECK(band->first == doctest::Approx(g.p_edge(5)));
    CHECK(band->second == doctest::Approx(g.p_edge(12)));
    CHECK(f.min_value() == doctest::Approx(-0.5));
    CHECK(f.max_value() == doctest::Approx(0.25));
    CHECK(f.grid_integral() == doctest::Approx((0.25 - 0.5) * g.cell_area()));
}

TEST_CASE("periodic interpolation in q") {
    GridSpec g = cyl(8);
    CylinderField f = make(g, [](double q, double) { return std::cos(2 * M_PI * q); });
    // exact at cell centers, periodic across the seam
    CHECK(f.interp_q(g.q_center(3), 0) == doctest::Approx(f.at(3, 0)));
    double mid = f.interp_q(0.0, 0);
    CHECK(mid == doctest::Approx(0.5 * (f.at(7, 0) + f.at(0, 0))));
    CHECK(f.interp_q(1.0 + g.q_center(2), 4) == doctest::Approx(f.at(2, 4)));
    CHECK(f.interp_q(g.q_center(2) - 1.0, 4) == doctest::Approx(f.at(2, 4)));
}

TEST_CASE("pole values are row means") {
    GridSpec g = cyl(8);
    g.space = Space::sphere;
    CylinderField f = make(g, [](double q, double p) { return p + std::sin(2 * M_PI * q); });
    double south = 0, north = 0;
    for (int i = 0; i < 8; ++i) {
        south += f.at(i, 0);
        north += f.at(i, 7);
    }
    CHECK(f.pole_value(true) == doctest::Approx(south / 8));
    CHECK(f.pole_value(false) == doctest::Approx(north / 8));
}

TEST_CASE("shear by whole cells is a cyclic shift") {
    GridSpec g = cyl(16);
    CylinderField f = make(g, [](double q, double p) {
        return bump_profile(p, 0.0, 0.3) * (1.0 + 0.5 * std::sin(2 * M_PI * q));
    });
    ShearMap m;
    m.profile.assign(16, 2.0 * g.dq());
    m.profile.front() = 0.0;
    m.profile.back() = 0.0;
    CylinderField sheared = apply_shear(f, m);
    for (int i = 0; i < 16; ++i) {
        CHECK(sheared.at(i, 0) == 0.0);
        CHECK(sheared.at(i, 15) == 0.0);
        for (int j = 1; j < 15; ++j)
            CHECK(sheared.at(i, j) == doctest::Approx(f.at((i + 16 - 2) % 16, j)).epsilon(1e-12));
    }
}

TEST_CASE("positive and negative parts recombine") {
    GridSpec g = cyl(16);
    CylinderField f = make(g, [](double q, double p) {
        return 0.7 * bump_profile(p, 0.15, 0.2) - 0.4 * bump_profile(p, -0.2, 0.15) +
               0.05 * std::sin(2 * M_PI * q) * bump_profile(p, 0.0, 0.35);
    });
    auto [pos, neg] = pos_neg_split(f);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        CHECK(pos.values[k] >= 0.0);
        CHECK(neg.values[k] >= 0.0);
        CHECK(pos.values[k] - neg.values[k] == doctest::Approx(f.values[k]).epsilon(1e-15));
    }
}

TEST_CASE("field arithmetic") {
    GridSpec g = cyl(8);
    CylinderField a = make(g, [](double, double p) { return p; });
    CylinderField b = make(g, [](double q, double) { return q; });
    CylinderField sum = field_add(a, b);
    CHECK(sum.at(2, 3) == doctest::Approx(a.at(2, 3) + b.at(2, 3)));
    CylinderField half = field_scale(a, 0.5);
    CHECK(half.at(5, 1) == doctest::Approx(0.5 * a.at(5, 1)));
    CylinderField sq = field_map(a, [](double v) { return v * v; });
    CHECK(sq.at(1, 6) == doctest::Approx(a.at(1, 6) * a.at(1, 6)));

    GridSpec other = cyl(16);
    CylinderField c = make(other, [](double, double p) { return p; });
    CHECK_THROWS_AS(field_add(a, c), domain_error);
}

TEST_CASE("niceness detector on crafted fields") {
    GridSpec g = cyl(64);
    // q-independent band: every critical level is a circle
    CylinderField flat = make(g, [](double, double p) { return bump_profile(p, 0.0, 0.25); });
    NiceReport r1 = check_nice(flat);
    CHECK(!r1.is_nice);

    // band with wavy interior but q-independent collars stays nice
    CylinderField wavy = make(g, [](double q, double p) {
        double base = bump_profile(p, 0.0, 0.25);
        double chi = smoothstep01((0.25 - std::fabs(p)) / 0.25 * 4.0 - 1.0);
        return base * (1.0 + 0.3 * chi * (std::cos(2 * M_PI * q) +
                                          0.31 * std::sin(4 * M_PI * q + 0.7)));
    });
    NiceReport r2 = check_nice(wavy);
    CHECK(r2.is_nice);
    CHECK(r2.delta >= 2 * g.dp());
    CHECK(!r2.critical_cells.empty());

    // q-dependence reaching the support edge breaks the collar
    CylinderField edge = make(g, [](double q, double p) {
        return bump_profile(p, 0.0, 0.25) * (1.0 + 0.3 * std::cos(2 * M_PI * q));
    });
    CHECK(!check_nice(edge).is_nice);
}

TEST_CASE("expression sampling matches direct evaluation") {
    GridSpec g = cyl(32);
    CylinderField f = sample_field(parse_expression("p*p+0.1*sin(2*pi*q)"), g);
    for (int i : {0, 7, 31})
        for (int j : {0, 15, 31}) {
            double q = g.q_center(i), p = g.p_center(j);
            CHECK(f.at(i, j) == doctest::Approx(p * p + 0.1 * std::sin(2 * M_PI * q)));
        }
}
