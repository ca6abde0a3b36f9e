#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "symh/contour.hpp"
#include "symh/errors.hpp"
#include "symh/field.hpp"
#include "symh/homog.hpp"
#include "symh/io.hpp"
#include "symh/tmeasure.hpp"

#include "json.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <vector>

using namespace symh;

namespace {

const GridSpec kCyl{128, 128, -0.5, 0.5, Space::cylinder};
const GridSpec kSph{128, 128, -0.5, 0.5, Space::sphere};

double lobe(double p) {
    return 0.9 * bump_profile(p, 0.1, 0.15) - 0.6 * bump_profile(p, -0.15, 0.12);
}

CylinderField constant_field(const GridSpec& gs, double v) {
    return CylinderField{gs, std::vector<double>(gs.cells(), v)};
}

template <typename Fn>
CylinderField profile_field(const GridSpec& gs, Fn&& phi) {
    CylinderField f{gs, std::vector<double>(gs.cells(), 0.0)};
    for (int j = 0; j < gs.np; ++j) {
        double v = phi(gs.p_center(j));
        for (int i = 0; i < gs.nq; ++i) f.at(i, j) = v;
    }
    return f;
}

bool throws_ambiguous(const TopologicalMeasure& tm, const Region& r) {
    try {
        tm.evaluate(r);
    } catch (const domain_error& e) {
        return std::strstr(e.what(), "ambiguous") != nullptr;
    }
    return false;
}

} // namespace

TEST_CASE("winding measure detects essential annuli bracketing its level") {
    Region band = make_band_region(kCyl, 0.1, 0.2);
    CHECK(tau_p0_eval(0.15, band) == 1.0);
    CHECK(tau_p0_eval(0.0, band) == 0.0);
    CHECK(tau_p0_eval(0.3, band) == 0.0);

    Region disk = make_disk_region(kCyl, 0.5, 0.15, 0.1, 0.05);
    CHECK(tau_p0_eval(0.15, disk) == 0.0);

    Region both = region_union(band, disk);
    CHECK(tau_p0_eval(0.15, both) == 1.0);

    TauP0 tm(0.15);
    CHECK(tm.evaluate(band) == 1.0);
    CHECK(tm.space() == Space::cylinder);
    CHECK(tm.total_mass() == 1.0);
    CHECK(tm.p0() == 0.15);
}

TEST_CASE("calabi measure scores components by their complement halves") {
    TauCalabi tm;
    CHECK(tm.space() == Space::sphere);
    CHECK(tm.total_mass() == 1.0);

    Region small_cap = make_cap_region(kSph, true, -0.1);
    CHECK(area(small_cap) < 0.45);
    CHECK(tm.evaluate(small_cap) == 0.0);

    Region big_cap = make_cap_region(kSph, true, 0.1);
    CHECK(area(big_cap) > 0.55);
    CHECK(tm.evaluate(big_cap) == 1.0);

    // a mid band leaves two caps, each at most a half
    Region band = make_band_region(kSph, -0.1, 0.1);
    CHECK(tm.evaluate(band) == 1.0);

    Region d1 = make_disk_region(kSph, 0.25, 0.1, 0.06, 0.05);
    Region d2 = make_disk_region(kSph, 0.75, -0.2, 0.06, 0.05);
    CHECK(tm.evaluate(region_union(d1, d2)) == 0.0);

    // a hemisphere complement sits exactly on the half; the measure must
    // refuse rather than pick a side
    Region hemi = make_cap_region(kSph, true, 0.0);
    CHECK(area(hemi) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(throws_ambiguous(tm, hemi));
}

TEST_CASE("linear baseline integrates its density over the region") {
    LinearTM lt = linear_tm(constant_field(kCyl, 1.0));
    CHECK(lt.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lt.space() == Space::cylinder);

    Region band = make_band_region(kCyl, 0.1, 0.2);
    CHECK(lt.evaluate(band) == doctest::Approx(area(band)).epsilon(1e-12));
    Region disk = make_disk_region(kCyl, 0.5, 0.15, 0.1, 0.05);
    double expect = static_cast<double>(disk.cell_count()) * kCyl.cell_area();
    CHECK(lt.evaluate(disk) == doctest::Approx(expect).epsilon(1e-12));

    GridSpec other{64, 64, -0.5, 0.5, Space::cylinder};
    CHECK_THROWS_AS(lt.evaluate(make_band_region(other, 0.1, 0.2)), domain_error);
    CHECK_THROWS_AS(linear_tm(constant_field(kCyl, -1.0)), domain_error);
}

TEST_CASE("quasi-integral layer cake matches level quadrature and plain integration") {
    CylinderField f = profile_field(kCyl, lobe);
    TauP0 tm(0.0);
    double qi = quasi_integral(tm, f, 512);
    CHECK(std::fabs(qi - eta_oracle(f, 0.0, 512)) <= 1e-6);
    CHECK(std::fabs(qi - lobe(0.0)) <= 5e-3);

    LinearTM lt = linear_tm(constant_field(kCyl, 1.0));
    CylinderField band = profile_field(kCyl, [](double p) { return bump_profile(p, 0.0, 0.22); });
    CHECK(std::fabs(quasi_integral(lt, band, 512) - band.grid_integral()) <= 1e-3);

    // normalization on the sphere: the constant one integrates to one
    TauCalabi cal;
    CHECK(quasi_integral(cal, constant_field(kSph, 1.0), 512) == 1.0);
}

TEST_CASE("set functions are recovered from their quasi-integrals") {
    TauP0 tp(0.0);
    auto qi_tp = [&](const CylinderField& g) { return quasi_integral(tp, g, 256); };
    Region k_band = make_band_region(kCyl, -0.05, 0.1);
    Region k_disk = make_disk_region(kCyl, 0.5, 0.0, 0.12, 0.08);
    std::vector<double> seq;
    CHECK(tau_from_qi(qi_tp, k_band, 2, &seq) == 1.0);
    REQUIRE(seq.size() == 2);
    CHECK(seq[0] >= seq[1]);
    CHECK(tau_from_qi(qi_tp, k_disk, 2) == 0.0);

    TauCalabi cal;
    auto qi_cal = [&](const CylinderField& g) { return quasi_integral(cal, g, 256); };
    Region k_sband = make_band_region(kSph, -0.1, 0.15);
    Region k_scap = make_cap_region(kSph, true, -0.2);
    CHECK(tau_from_qi(qi_cal, k_sband, 2) == 1.0);
    CHECK(tau_from_qi(qi_cal, k_scap, 2) == 0.0);

    LinearTM lt = linear_tm(constant_field(kCyl, 1.0));
    auto qi_lin = [&](const CylinderField& g) { return quasi_integral(lt, g, 256); };
    CHECK(std::fabs(tau_from_qi(qi_lin, k_band, 2) - area(k_band)) <= 5 * kCyl.dp());

    // a quasi-integral that grows as the collar shrinks is not monotone;
    // the scale pushes the increase past the detector's 1e-2 slack
    auto bad = [](const CylinderField& g) { return -10.0 * g.grid_integral(); };
    CHECK_THROWS_AS(tau_from_qi(bad, k_band, 2), domain_error);
}

TEST_CASE("compactified measures resolve the four region classes") {
    auto base = std::make_shared<TauP0>(0.0);
    Region o = make_band_region(kCyl, -0.25, 0.3);
    o.open = true;
    CompactifiedTM hat = compactify(base, o);
    CHECK(hat.total_mass() == base->evaluate(o));

    Region u = make_band_region(kCyl, -0.1, 0.15);
    u.open = true;
    CHECK(hat.evaluate(u) == base->evaluate(u));

    Region ohat = o;
    ohat.at_infinity = true;
    CHECK(hat.evaluate(ohat) == base->evaluate(o));

    Region rest_open = region_difference(o, u);
    rest_open.open = true;
    rest_open.at_infinity = true;
    CHECK(hat.evaluate(rest_open) == base->evaluate(region_difference(o, u)));

    Region rest_closed = region_difference(o, u);
    rest_closed.open = false;
    rest_closed.at_infinity = true;
    CHECK(hat.evaluate(rest_closed) + hat.evaluate(u) == base->evaluate(o));

    // regions leaking outside the domain are not representable
    Region leak = make_band_region(kCyl, 0.2, 0.4);
    CHECK_THROWS_AS(hat.evaluate(leak), domain_error);

    // the domain itself must be open, nonempty and finite
    Region closed_o = make_band_region(kCyl, -0.25, 0.3);
    CHECK_THROWS_AS(compactify(base, closed_o), domain_error);
    Region marked = o;
    marked.at_infinity = true;
    CHECK_THROWS_AS(compactify(base, marked), domain_error);
}

TEST_CASE("axiom corpus runner distinguishes sound and broken inputs") {
    TauP0 tp(0.0);
    std::vector<AxiomCase> corpus;
    corpus.push_back({"band plus far disk", "disjoint_pair",
                      {make_band_region(kCyl, -0.1, 0.05), make_disk_region(kCyl, 0.5, 0.3, 0.1, 0.05)}});
    corpus.push_back({"band in band", "nested_pair",
                      {make_band_region(kCyl, -0.05, 0.02), make_band_region(kCyl, -0.15, 0.1)}});
    corpus.push_back({"sandwich", "nested_triple",
                      {make_band_region(kCyl, -0.03, 0.02), make_band_region(kCyl, -0.1, 0.08),
                       make_band_region(kCyl, -0.2, 0.15)}});
    AxiomCheckResult res = check_tm_axioms(tp, corpus);
    CHECK(res.all_pass);
    nlohmann::json rep = nlohmann::json::parse(res.report_json);
    REQUIRE(rep.is_array());
    CHECK(rep.size() == corpus.size());
    for (const auto& entry : rep) CHECK(entry["pass"] == true);

    // reversed nesting is reported as a failure, not an exception
    std::vector<AxiomCase> broken;
    broken.push_back({"backwards", "nested_pair",
                      {make_band_region(kCyl, -0.15, 0.1), make_band_region(kCyl, -0.05, 0.02)}});
    AxiomCheckResult bad = check_tm_axioms(tp, broken);
    CHECK_FALSE(bad.all_pass);
}

TEST_CASE("measure descriptors round trip through json") {
    auto tp = measure_from_json(R"({"kind":"tau_p0","p0":0.15})");
    REQUIRE(tp);
    CHECK(tp->space() == Space::cylinder);
    CHECK(tp->evaluate(make_band_region(kCyl, 0.1, 0.2)) == 1.0);

    auto cal = measure_from_json(R"({"kind":"tau_calabi"})");
    REQUIRE(cal);
    CHECK(cal->space() == Space::sphere);

    std::string lin_desc = std::string(R"({"kind":"linear","density":)") +
                           field_to_json(constant_field(kCyl, 1.0)) + "}";
    auto lin = measure_from_json(lin_desc);
    REQUIRE(lin);
    CHECK(lin->total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    Region o = make_band_region(kCyl, -0.25, 0.3);
    o.open = true;
    std::string hat_desc = std::string(R"({"kind":"compactified","base":{"kind":"tau_p0","p0":0},"domain":)") +
                           region_to_json(o) + "}";
    auto hat = measure_from_json(hat_desc);
    REQUIRE(hat);
    Region u = make_band_region(kCyl, -0.1, 0.15);
    u.open = true;
    CHECK(hat->evaluate(u) == 1.0);

    CHECK_THROWS_AS(measure_from_json("not json"), domain_error);
    CHECK_THROWS_AS(measure_from_json(R"({"p0":0})"), domain_error);
    CHECK_THROWS_AS(measure_from_json(R"({"kind":"unknown"})"), domain_error);
    CHECK_THROWS_AS(measure_from_json(R"({"kind":"tau_p0"})"), domain_error);
    CHECK_THROWS_AS(measure_from_json(R"({"kind":"linear"})"), domain_error);
}
