#include "symh/check.hpp"

#include "symh/compare.hpp"
#include "symh/contour.hpp"
#include "symh/errors.hpp"
#include "symh/expression.hpp"
#include "symh/field.hpp"
#include "symh/homog.hpp"
#include "symh/io.hpp"
#include "symh/reeb.hpp"
#include "symh/tmeasure.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <vector>

namespace symh {

namespace {

struct Checker {
    std::ostringstream out;
    int total = 0;
    int failed = 0;

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        ++total;
        bool ok = false;
        std::string detail;
        try {
            auto res = fn();
            ok = res.first;
            detail = res.second;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failed;
        out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    }
};

GridSpec cyl128() {
    GridSpec g;
    g.nq = 128;
    g.np = 128;
    g.p_min = -0.5;
    g.p_max = 0.5;
    g.space = Space::cylinder;
    return g;
}

GridSpec sph128() {
    GridSpec g = cyl128();
    g.space = Space::sphere;
    return g;
}

CylinderField sample(const GridSpec& g, const std::function<double(double, double)>& fn) {
    CylinderField f;
    f.spec = g;
    f.values.resize(g.cells());
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j)
            f.values[g.index(i, j)] = fn(g.q_center(i), g.p_center(j));
    return f;
}

std::pair<bool, std::string> pass_if(bool ok, const std::string& detail) {
    return {ok, detail};
}

} // namespace

CheckResult run_checks(int threads) {
    if (threads < 1) throw domain_error("thread count must be positive");
    Checker ck;
    GridSpec g = cyl128();
    GridSpec gs = sph128();
    const double moll = 1e-3;

    ck.run("expression eval", [&] {
        Expression e = parse_expression("0.8*bump(p,0.05,0.22)*(1+0.5*sin(2*pi*q))");
        double worst = 0;
        for (int k = 0; k < 7; ++k) {
            double q = 0.13 * k;
            double p = -0.3 + 0.09 * k;
            double direct = 0.8 * bump_profile(p, 0.05, 0.22) *
                            (1 + 0.5 * std::sin(2 * M_PI * q));
            worst = std::max(worst, std::fabs(e.eval(q, p) - direct));
        }
        return pass_if(worst <= 1e-12, "max deviation " + format_double(worst));
    });

    ck.run("expression errors", [&] {
        try {
            parse_expression("q +* p");
        } catch (const domain_error& e) {
            std::string w = e.what();
            return pass_if(w.find("offset") != std::string::npos, "rejected with " + w);
        }
        return pass_if(false, "malformed input was accepted");
    });

    CylinderField band = sample(g, [](double, double p) { return 0.8 * bump_profile(p, 0.05, 0.22); });

    ck.run("niceness detector", [&] {
        bool plain = check_nice(band).is_nice;
        CylinderField pert = field_add(band, nice_perturbation(band, 5e-2, 0));
        bool perturbed = check_nice(pert).is_nice;
        return pass_if(!plain && perturbed,
                       std::string("degenerate band ") + (plain ? "accepted" : "rejected") +
                           ", perturbed band " + (perturbed ? "accepted" : "rejected"));
    });

    ck.run("region geometry", [&] {
        Region br = make_band_region(g, -0.125, 0.25);
        int rows = 0;
        for (int j = 0; j < g.np; ++j) {
            double p = g.p_center(j);
            if (p >= -0.125 && p <= 0.25) ++rows;
        }
        double want = rows * g.dp();
        double got = area(br);
        bool area_ok = std::fabs(got - want) <= 1e-12;
        auto flags = component_essential_flags(br);
        bool ess_ok = flags.size() == 1 && flags[0];
        Region dr = make_disk_region(g, 0.5, 0.0, 0.2, 0.15);
        bool disk_ok = true;
        for (const Contour& c : boundary_circles(dr)) disk_ok = disk_ok && c.winding == 0;
        return pass_if(area_ok && ess_ok && disk_ok,
                       "band area " + format_double(got) + " vs " + format_double(want) +
                           ", band essential, disk boundaries contractible");
    });

    ck.run("contour tree shape", [&] {
        CylinderField f = field_add(band, nice_perturbation(band, 5e-2, 0));
        ReebGraph rg = build_reeb(f);
        bool tree = rg.arcs.size() + 1 == rg.nodes.size();
        std::vector<int> path = gamma0_path(rg);
        bool ends = !path.empty() && path.front() == rg.v_minus && path.back() == rg.v_plus;
        return pass_if(tree && ends,
                       format_double(static_cast<double>(rg.nodes.size())) + " nodes, " +
                           format_double(static_cast<double>(rg.arcs.size())) + " arcs, path of " +
                           format_double(static_cast<double>(path.size())) + " nodes");
    });

    ck.run("fiberwise profiles", [&] {
        HomogenizedProfile h = homogenize_general(band, moll, threads);
        double worst = 0;
        for (int j = 0; j < g.np; ++j) {
            double p = g.p_center(j);
            worst = std::max(worst, std::fabs(h.eval(p) - 0.8 * bump_profile(p, 0.05, 0.22)));
        }
        double tol = moll + 3e-3;
        return pass_if(worst <= tol,
                       "max profile deviation " + format_double(worst) + " (tol " +
                           format_double(tol) + ")");
    });

    ck.run("disk vanishing", [&] {
        CylinderField f = sample(g, [](double q, double p) {
            double d = q - 0.5;
            d -= std::floor(d + 0.5);
            return bump_profile(d, 0.0, 0.22) * bump_profile(p, 0.05, 0.2);
        });
        HomogenizedProfile h = homogenize_general(f, moll, threads);
        double worst = std::max(std::fabs(h.max_value()), std::fabs(h.min_value()));
        return pass_if(worst <= 5e-2, "max |profile| " + format_double(worst));
    });

    ck.run("dual-path evaluation", [&] {
        CylinderField mix = sample(g, [](double q, double p) {
            double d = q - 0.3;
            d -= std::floor(d + 0.5);
            return 0.7 * bump_profile(p, -0.05, 0.18) + 0.9 * bump_profile(d, 0.0, 0.2) * bump_profile(p, 0.1, 0.12);
        });
        double worst = 0;
        for (double p0 : {-0.1, 0.0, 0.1}) {
            double a = eta(mix, p0, moll, threads);
            double b = eta_oracle(mix, p0, 256, threads);
            worst = std::max(worst, std::fabs(a - b));
        }
        return pass_if(worst <= 5e-2, "max path gap " + format_double(worst));
    });

    ck.run("asymptotic norm", [&] {
        CylinderField f = sample(g, [](double, double p) {
            return 0.9 * bump_profile(p, 0.1, 0.15) - 0.6 * bump_profile(p, -0.15, 0.12);
        });
        double cp = c_plus(f, moll, threads);
        double cm = c_minus(f, moll, threads);
        double mu = hofer_asymptotic(f, moll, threads);
        double cpo = c_plus_oracle(f);
        bool id_ok = mu == cp - cm;
        bool oracle_ok = std::fabs(cp - cpo) <= 1e-2;
        return pass_if(id_ok && oracle_ok,
                       "c+ " + format_double(cp) + " vs oracle " + format_double(cpo) +
                           ", norm identity " + (id_ok ? "exact" : "broken"));
    });

    ck.run("measure axioms", [&] {
        std::vector<AxiomCase> cases;
        cases.push_back({"bands apart", "disjoint_pair",
                         {make_band_region(g, 0.0, 0.1), make_band_region(g, 0.2, 0.3)}});
        cases.push_back({"band and disk", "disjoint_pair",
                         {make_band_region(g, 0.0, 0.1),
                          make_disk_region(g, 0.5, -0.3, 0.15, 0.1)}});
        cases.push_back({"nested bands", "nested_pair",
                         {make_band_region(g, 0.0, 0.1), make_band_region(g, -0.1, 0.2)}});
        cases.push_back({"band sandwich", "nested_triple",
                         {make_band_region(g, 0.0, 0.1), make_band_region(g, -0.05, 0.15),
                          make_band_region(g, -0.1, 0.2)}});
        TauP0 tp(0.05);
        auto rp = check_tm_axioms(tp, cases);
        CylinderField one;
        one.spec = g;
        one.values.assign(g.cells(), 1.0);
        LinearTM lin(one);
        auto rl = check_tm_axioms(lin, cases);
        std::vector<AxiomCase> scases;
        scases.push_back({"sphere band and cap", "disjoint_pair",
                          {make_band_region(gs, -0.1, 0.2),
                           make_cap_region(gs, true, -0.35)}});
        scases.push_back({"nested sphere bands", "nested_pair",
                          {make_band_region(gs, -0.1, 0.2), make_band_region(gs, -0.2, 0.3)}});
        TauCalabi tc;
        auto rc = check_tm_axioms(tc, scases);
        bool ok = rp.all_pass && rl.all_pass && rc.all_pass;
        return pass_if(ok, std::string("winding measure ") + (rp.all_pass ? "pass" : "fail") +
                               ", linear " + (rl.all_pass ? "pass" : "fail") + ", area measure " +
                               (rc.all_pass ? "pass" : "fail"));
    });

    ck.run("layer cake", [&] {
        CylinderField f = sample(g, [](double q, double p) {
            double d = q - 0.6;
            d -= std::floor(d + 0.5);
            return bump_profile(d, 0.0, 0.25) * bump_profile(p, 0.0, 0.2);
        });
        CylinderField one;
        one.spec = g;
        one.values.assign(g.cells(), 1.0);
        LinearTM lin(one);
        double ql = quasi_integral(lin, f, 512, threads);
        double direct = f.grid_integral();
        double dev = std::fabs(ql - direct);
        return pass_if(dev <= 1e-2, "quadrature " + format_double(ql) + " vs integral " +
                                        format_double(direct));
    });

    ck.run("area quasi-state", [&] {
        CylinderField one;
        one.spec = gs;
        one.values.assign(gs.cells(), 1.0);
        TauCalabi tc;
        double unit = quasi_integral(tc, one, 512, threads);
        CylinderField f = sample(gs, [](double, double p) { return 0.5 * (1.0 + std::sin(M_PI * p)); });
        double zf = quasi_integral(tc, f, 512, threads);
        double zf2 = quasi_integral(tc, field_map(f, [](double v) { return v * v; }), 512, threads);
        double dev = std::fabs(zf2 - zf * zf);
        bool ok = unit == 1.0 && dev <= 5e-2;
        return pass_if(ok, "unit value " + format_double(unit) + ", squaring deviation " +
                               format_double(dev));
    });

    ck.run("set-function recovery", [&] {
        Region k_band = make_band_region(g, -0.1, 0.1);
        Region k_disk = make_disk_region(g, 0.5, 0.2, 0.18, 0.12);
        auto qi_eta = [&](const CylinderField& f) { return eta_oracle(f, 0.0, 256, threads); };
        double v_band = tau_from_qi(qi_eta, k_band, 2);
        double v_disk = tau_from_qi(qi_eta, k_disk, 2);
        CylinderField one;
        one.spec = g;
        one.values.assign(g.cells(), 1.0);
        LinearTM lin(one);
        auto qi_lin = [&](const CylinderField& f) { return quasi_integral(lin, f, 256, threads); };
        double v_lin = tau_from_qi(qi_lin, k_band, 2);
        double a_band = area(k_band);
        bool ok = v_band == 1.0 && v_disk == 0.0 && std::fabs(v_lin - a_band) <= 5 * g.dp();
        return pass_if(ok, "band " + format_double(v_band) + ", disk " + format_double(v_disk) +
                               ", linear " + format_double(v_lin) + " vs area " +
                               format_double(a_band));
    });

    ck.run("compactified classes", [&] {
        double worst = 0;
        auto exercise = [&](const TopologicalMeasure& base, const GridSpec& spec) {
            Region o = make_band_region(spec, -0.25, 0.3);
            o.open = true;
            Region u = make_band_region(spec, -0.1, 0.15);
            u.open = true;
            auto baseptr = std::shared_ptr<const TopologicalMeasure>(&base, [](const TopologicalMeasure*) {});
            CompactifiedTM hat = compactify(baseptr, o);
            Region ohat = o;
            ohat.at_infinity = true;
            worst = std::max(worst, std::fabs(hat.evaluate(ohat) - base.evaluate(o)));
            worst = std::max(worst, std::fabs(hat.evaluate(u) - base.evaluate(u)));
            Region rest = region_difference(o, u);
            rest.open = true;
            rest.at_infinity = true;
            worst = std::max(worst, std::fabs(hat.evaluate(rest) - base.evaluate(region_difference(o, u))));
            Region compl_class = region_difference(o, u);
            compl_class.open = false;
            compl_class.at_infinity = true;
            worst = std::max(worst,
                             std::fabs(hat.evaluate(compl_class) + hat.evaluate(u) - base.evaluate(o)));
        };
        TauP0 tp(0.0);
        exercise(tp, g);
        CylinderField one;
        one.spec = g;
        one.values.assign(g.cells(), 1.0);
        LinearTM lin(one);
        exercise(lin, g);
        TauCalabi tc;
        exercise(tc, gs);
        return pass_if(worst <= 1e-12, "max class identity deviation " + format_double(worst));
    });

    ck.run("pullback identities", [&] {
        auto gbar = [](double p) { return 0.7 * bump_profile(p, 0.03, 0.12); };
        MomentPullbackReport rep = moment_pullback_check(gbar, 0.2, 0.0, g, 256, moll, threads);
        bool ok = rep.dev_eta <= 5e-2 && rep.dev_zeta <= 5e-2;
        return pass_if(ok, "fiber deviation " + format_double(rep.dev_eta) +
                               ", sphere deviation " + format_double(rep.dev_zeta));
    });

    ck.run("sector parameters", [&] {
        Gamma0Params gp = solve_gamma0(2, 0.05, std::sqrt(1.0 / 3 + 0.045), 0.3);
        bool ok = gp.residual <= 1e-12 && gp.curve_area_dev <= 1e-6 && gp.rho1 > 0 &&
                  gp.rho1 < gp.rho2;
        bool caught = false;
        try {
            solve_gamma0(2, 0.05, std::sqrt(1.0 / 3 + 0.02), 1.5);
        } catch (const domain_error&) {
            caught = true;
        }
        return pass_if(ok && caught, "residual " + format_double(gp.residual) + ", curve area gap " +
                                         format_double(gp.curve_area_dev) + ", infeasible angle " +
                                         (caught ? "rejected" : "accepted"));
    });

    ck.run("threshold experiment", [&] {
        ExperimentConfig cfg;
        cfg.grid = g;
        cfg.r = 0.2;
        cfg.corpus_size = 4;
        cfg.seed = 42;
        cfg.n_levels = 256;
        cfg.threads = threads;
        ComparisonReport low = run_comparison(cfg);
        cfg.r = 0.35;
        ComparisonReport high = run_comparison(cfg);
        bool ok = low.verdict == "match" && high.verdict == "mismatch" &&
                  high.has_counterexample && high.counterexample.gap >= cfg.mismatch_margin;
        double max_gap = 0;
        for (const auto& fc : low.per_field) max_gap = std::max(max_gap, fc.gap);
        return pass_if(ok, "inside-threshold verdict " + low.verdict + " (max gap " +
                               format_double(max_gap) + "), outside-threshold verdict " +
                               high.verdict + " (witness gap " +
                               format_double(high.counterexample.gap) + ")");
    });

    ck.run("serialization round trips", [&] {
        std::string fj = field_to_json(band);
        CylinderField back = field_from_json(fj);
        bool field_ok = field_to_json(back) == fj;
        Region br = make_band_region(g, -0.125, 0.25);
        Region rback = region_from_json(region_to_json(br));
        bool region_ok = rback.mask == br.mask && rback.open == br.open;
        ReebGraph rg = build_reeb(field_add(band, nice_perturbation(band, 5e-2, 0)));
        bool dot_ok = export_dot(rg).find("digraph") != std::string::npos;
        return pass_if(field_ok && region_ok && dot_ok,
                       std::string("field json ") + (field_ok ? "stable" : "unstable") +
                           ", region mask preserved, graph export well-formed");
    });

    CheckResult res;
    std::ostringstream head;
    head << ck.out.str();
    head << (ck.failed == 0 ? "OK" : "FAILING") << ": " << (ck.total - ck.failed) << "/"
         << ck.total << " checks passed\n";
    res.report = head.str();
    res.all_pass = ck.failed == 0;
    return res;
}

} // namespace symh
