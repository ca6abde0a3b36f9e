#include "cli_app.hpp"

#include "symh/check.hpp"
#include "symh/compare.hpp"
#include "symh/contour.hpp"
#include "symh/errors.hpp"
#include "symh/field.hpp"
#include "symh/homog.hpp"
#include "symh/io.hpp"
#include "symh/reeb.hpp"
#include "symh/tmeasure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace symh {

namespace {

// Bad flag combinations detected after CLI11 parsing; maps to exit code 2.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct FieldArgs {
    std::string field_path;
    std::string expr;
    int grid = 256;
};

void add_field_flags(CLI::App* cmd, FieldArgs& fa) {
    cmd->add_option("--field", fa.field_path, "input field JSON file");
    cmd->add_option("--expr", fa.expr, "field expression in q and p");
    cmd->add_option("--grid", fa.grid, "grid resolution for --expr (cells per axis)")
        ->check(CLI::PositiveNumber);
}

CylinderField load_field(const FieldArgs& fa, Space space) {
    if (!fa.field_path.empty() && !fa.expr.empty())
        throw usage_error("--field and --expr are mutually exclusive");
    if (!fa.field_path.empty()) {
        CylinderField f = field_from_json(load_text_file(fa.field_path));
        if (f.spec.space != space)
            throw domain_error(std::string("field space mismatch: expected ") +
                               (space == Space::sphere ? "sphere" : "cylinder"));
        return f;
    }
    if (!fa.expr.empty()) {
        GridSpec spec{fa.grid, fa.grid, -0.5, 0.5, space};
        return sample_field(parse_expression(fa.expr), spec);
    }
    throw usage_error("provide --field or --expr");
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
    if (out_path.empty())
        out << text;
    else
        save_text_file(out_path, text);
}

std::string ensure_newline(std::string s) {
    if (s.empty() || s.back() != '\n') s.push_back('\n');
    return s;
}

// Same perturbation schedule homogenize_general uses internally, exposed so
// `reeb` can draw the graph of the field the profile actually comes from.
CylinderField make_generic(const CylinderField& f, double mollification) {
    if (check_nice(f).is_nice) return f;
    std::string last;
    for (int attempt = 0; attempt < 3; ++attempt) {
        CylinderField g = field_add(f, nice_perturbation(f, mollification, attempt));
        NiceReport rep = check_nice(g);
        if (rep.is_nice) return g;
        last = rep.violations.empty() ? "unspecified violation" : rep.violations.front();
    }
    throw domain_error(
        "mollification failed to reach a generic field at this resolution; last obstruction: " +
        last);
}

struct MeasureArgs {
    std::string descriptor_path;
    std::string kind;
    double p0 = 0.0;
    std::string density_path;
};

void add_measure_flags(CLI::App* cmd, MeasureArgs& ma) {
    cmd->add_option("--measure", ma.descriptor_path, "measure descriptor JSON file");
    cmd->add_option("--kind", ma.kind, "measure kind: tau_p0 | tau_calabi | linear");
    cmd->add_option("--p0", ma.p0, "fiber height for --kind tau_p0");
    cmd->add_option("--density", ma.density_path, "density field JSON for --kind linear");
}

std::unique_ptr<TopologicalMeasure> build_measure(const MeasureArgs& ma) {
    if (!ma.descriptor_path.empty() && !ma.kind.empty())
        throw usage_error("--measure and --kind are mutually exclusive");
    if (!ma.descriptor_path.empty())
        return measure_from_json(load_text_file(ma.descriptor_path));
    if (ma.kind == "tau_p0") return std::make_unique<TauP0>(ma.p0);
    if (ma.kind == "tau_calabi") return std::make_unique<TauCalabi>();
    if (ma.kind == "linear") {
        if (ma.density_path.empty())
            throw usage_error("--kind linear requires --density");
        return std::make_unique<LinearTM>(
            linear_tm(field_from_json(load_text_file(ma.density_path))));
    }
    if (ma.kind.empty()) throw usage_error("provide --measure or --kind");
    throw usage_error("unknown measure kind '" + ma.kind + "'");
}

std::string profile_to_json(const HomogenizedProfile& prof) {
    nlohmann::ordered_json j;
    j["p_lo"] = quantize12(prof.p_lo);
    j["p_hi"] = quantize12(prof.p_hi);
    nlohmann::ordered_json ps = nlohmann::ordered_json::array();
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < prof.p_samples.size(); ++k) {
        ps.push_back(quantize12(prof.p_samples[k]));
        vs.push_back(quantize12(prof.values[k]));
    }
    j["p"] = std::move(ps);
    j["values"] = std::move(vs);
    return j.dump(2) + "\n";
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"symplectic homogenization of compactly supported Hamiltonians"};
    app.require_subcommand(1);

    FieldArgs homog_fa, eta_fa, hofer_fa, reeb_fa, qi_fa;
    MeasureArgs measure_ma, qi_ma;
    std::string homog_out, homog_format = "csv";
    int homog_threads = 1;
    CLI::App* c_homog = app.add_subcommand("homog", "homogenized profile of a field");
    add_field_flags(c_homog, homog_fa);
    c_homog->add_option("--out", homog_out, "output file (default stdout)");
    c_homog->add_option("--format", homog_format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    c_homog->add_option("--threads", homog_threads, "worker threads")->check(CLI::PositiveNumber);

    double eta_p0 = 0.0;
    int eta_levels = 512, eta_threads = 1;
    std::string eta_out;
    CLI::App* c_eta = app.add_subcommand("eta", "quasi-integral at a fiber, both routes");
    add_field_flags(c_eta, eta_fa);
    c_eta->add_option("--p0", eta_p0, "fiber height");
    c_eta->add_option("--levels", eta_levels, "quadrature levels for the oracle route")
        ->check(CLI::PositiveNumber);
    c_eta->add_option("--threads", eta_threads, "worker threads")->check(CLI::PositiveNumber);
    c_eta->add_option("--out", eta_out, "output file (default stdout)");

    int hofer_threads = 1;
    std::string hofer_out;
    CLI::App* c_hofer = app.add_subcommand("hofer", "asymptotic Hofer invariants");
    add_field_flags(c_hofer, hofer_fa);
    c_hofer->add_option("--threads", hofer_threads, "worker threads")->check(CLI::PositiveNumber);
    c_hofer->add_option("--out", hofer_out, "output file (default stdout)");

    std::string reeb_out, reeb_format = "dot";
    int reeb_threads = 1;
    CLI::App* c_reeb = app.add_subcommand("reeb", "contour graph of a generic field");
    add_field_flags(c_reeb, reeb_fa);
    c_reeb->add_option("--format", reeb_format, "dot | json")
        ->check(CLI::IsMember({"dot", "json"}));
    c_reeb->add_option("--threads", reeb_threads, "worker threads")->check(CLI::PositiveNumber);
    c_reeb->add_option("--out", reeb_out, "output file (default stdout)");

    std::string measure_region, measure_out;
    CLI::App* c_measure = app.add_subcommand("measure", "evaluate a topological measure");
    add_measure_flags(c_measure, measure_ma);
    c_measure->add_option("--region", measure_region, "region JSON file")->required();
    c_measure->add_option("--out", measure_out, "output file (default stdout)");

    int qi_levels = 512, qi_threads = 1;
    std::string qi_out;
    CLI::App* c_qi = app.add_subcommand("qintegral", "quasi-integral of a field");
    add_field_flags(c_qi, qi_fa);
    add_measure_flags(c_qi, qi_ma);
    c_qi->add_option("--levels", qi_levels, "quadrature levels")->check(CLI::PositiveNumber);
    c_qi->add_option("--threads", qi_threads, "worker threads")->check(CLI::PositiveNumber);
    c_qi->add_option("--out", qi_out, "output file (default stdout)");

    ExperimentConfig cmp_cfg;
    int cmp_grid = 256;
    std::string cmp_out;
    CLI::App* c_cmp = app.add_subcommand("compare", "threshold experiment over a random corpus");
    c_cmp->add_option("--r", cmp_cfg.r, "band half-height")->required();
    c_cmp->add_option("--grid", cmp_grid, "grid resolution")->check(CLI::PositiveNumber);
    c_cmp->add_option("--corpus", cmp_cfg.corpus_size, "number of random fields")
        ->check(CLI::PositiveNumber);
    c_cmp->add_option("--seed", cmp_cfg.seed, "corpus RNG seed")->required();
    c_cmp->add_option("--levels", cmp_cfg.n_levels, "quadrature levels")
        ->check(CLI::PositiveNumber);
    c_cmp->add_option("--threads", cmp_cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    c_cmp->add_option("--out", cmp_out, "report file (default stdout)");

    int g0_n = 0;
    double g0_eps = 0, g0_rho2 = 0, g0_alpha = 0;
    std::string g0_out;
    CLI::App* c_g0 = app.add_subcommand("gamma0", "area-balanced sector parameters");
    c_g0->add_option("--n", g0_n, "number of equal-area pieces minus one")->required();
    c_g0->add_option("--eps", g0_eps, "outer radius slack")->required();
    c_g0->add_option("--rho2", g0_rho2, "outer radius")->required();
    c_g0->add_option("--alpha", g0_alpha, "sector half-angle")->required();
    c_g0->add_option("--out", g0_out, "output file (default stdout)");

    int check_threads = 1;
    CLI::App* c_check = app.add_subcommand("check", "cross-module invariant suite");
    c_check->add_option("--threads", check_threads, "worker threads")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (c_homog->parsed()) {
            CylinderField f = load_field(homog_fa, Space::cylinder);
            HomogenizedProfile prof = homogenize_general(f, 1e-3, homog_threads);
            if (homog_format == "json") {
                emit(homog_out, profile_to_json(prof), out);
            } else {
                std::vector<std::pair<double, double>> rows;
                rows.reserve(prof.p_samples.size());
                for (std::size_t k = 0; k < prof.p_samples.size(); ++k)
                    rows.emplace_back(prof.p_samples[k], prof.values[k]);
                emit(homog_out, profile_to_csv(rows), out);
            }
            return 0;
        }
        if (c_eta->parsed()) {
            CylinderField f = load_field(eta_fa, Space::cylinder);
            double via_profile = eta(f, eta_p0, 1e-3, eta_threads);
            double via_measure = eta_oracle(f, eta_p0, eta_levels, eta_threads);
            std::string text = "eta " + format_double(via_profile) + "\n" +
                               "eta_oracle " + format_double(via_measure) + "\n" +
                               "gap " + format_double(via_profile - via_measure) + "\n";
            emit(eta_out, text, out);
            return 0;
        }
        if (c_hofer->parsed()) {
            CylinderField f = load_field(hofer_fa, Space::cylinder);
            HomogenizedProfile prof = homogenize_general(f, 1e-3, hofer_threads);
            double cp = prof.max_value();
            double cm = prof.min_value();
            std::string text = "c_plus " + format_double(cp) + "\n" +
                               "c_minus " + format_double(cm) + "\n" +
                               "hofer_asymptotic " + format_double(cp - cm) + "\n";
            emit(hofer_out, text, out);
            return 0;
        }
        if (c_reeb->parsed()) {
            CylinderField f = make_generic(load_field(reeb_fa, Space::cylinder), 1e-3);
            ReebGraph g = build_reeb(f);
            if (reeb_format == "json") {
                LabeledPath lp = label_path(g, gamma0_path(g), f, 16, reeb_threads);
                emit(reeb_out, ensure_newline(labeled_path_to_json(lp)), out);
            } else {
                emit(reeb_out, ensure_newline(export_dot(g)), out);
            }
            return 0;
        }
        if (c_measure->parsed()) {
            std::unique_ptr<TopologicalMeasure> tm = build_measure(measure_ma);
            Region r = region_from_json(load_text_file(measure_region));
            emit(measure_out, format_double(tm->evaluate(r)) + "\n", out);
            return 0;
        }
        if (c_qi->parsed()) {
            std::unique_ptr<TopologicalMeasure> tm = build_measure(qi_ma);
            CylinderField f = load_field(qi_fa, tm->space());
            double v = quasi_integral(*tm, f, qi_levels, qi_threads);
            emit(qi_out, format_double(v) + "\n", out);
            return 0;
        }
        if (c_cmp->parsed()) {
            cmp_cfg.grid = GridSpec{cmp_grid, cmp_grid, -0.5, 0.5, Space::cylinder};
            ComparisonReport rep = run_comparison(cmp_cfg);
            emit(cmp_out, ensure_newline(rep.to_json()), out);
            return 0;
        }
        if (c_g0->parsed()) {
            Gamma0Params gp = solve_gamma0(g0_n, g0_eps, g0_rho2, g0_alpha);
            nlohmann::ordered_json j;
            j["n"] = gp.n;
            j["epsilon"] = quantize12(gp.epsilon);
            j["rho1"] = quantize12(gp.rho1);
            j["rho2"] = quantize12(gp.rho2);
            j["alpha"] = quantize12(gp.alpha);
            j["residual"] = quantize12(gp.residual);
            j["curve_area_dev"] = quantize12(gp.curve_area_dev);
            emit(g0_out, j.dump(2) + "\n", out);
            return 0;
        }
        if (c_check->parsed()) {
            CheckResult res = run_checks(check_threads);
            out << res.report;
            return res.all_pass ? 0 : 1;
        }
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no subcommand given\n";
    return 2;
}

} // namespace symh
