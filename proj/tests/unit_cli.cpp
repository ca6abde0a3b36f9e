#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cli_app.hpp"
#include "symh/contour.hpp"
#include "symh/field.hpp"
#include "symh/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace symh;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("symh");
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    CliResult r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

double line_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string name;
    double v;
    while (in >> name >> v)
        if (name == key) return v;
    FAIL(("missing line: " + key));
    return 0.0;
}

// temp file that removes itself
struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        save_text_file(path.string(), content);
    }
    ~TempFile() { std::remove(path.string().c_str()); }
};

const std::string kBandExpr = "bump(p,0,0.2)";

} // namespace

TEST_CASE("usage problems exit with code 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"no_such_command"}).code == 2);
    CHECK(run({"eta"}).code == 2);                       // no field source
    CHECK(run({"eta", "--expr", "p", "--field", "x"}).code == 2); // both sources
    CHECK(run({"measure", "--kind", "tau_p0"}).code == 2);        // no region
    CHECK(run({"gamma0", "--n", "2"}).code == 2);                 // missing params
    CHECK(run({"qintegral", "--kind", "linear", "--expr", kBandExpr}).code == 2);
    CHECK(run({"homog", "--expr", kBandExpr, "--format", "yaml"}).code == 2);
}

TEST_CASE("domain problems exit with code 1") {
    CliResult bad = run({"eta", "--expr", "bump(p,0,"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("error:") != std::string::npos);

    CliResult infeasible =
        run({"gamma0", "--n", "2", "--eps", "0.05", "--rho2", "0.6", "--alpha", "0.8"});
    CHECK(infeasible.code == 1);
    CHECK(infeasible.err.find("error:") != std::string::npos);

    CliResult zero = run({"reeb", "--expr", "0*p"});
    CHECK(zero.code == 1);
}

TEST_CASE("help is reported on stdout with exit zero") {
    CliResult top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("homog") != std::string::npos);
    CHECK(top.out.find("gamma0") != std::string::npos);
    CHECK(run({"eta", "--help"}).code == 0);
}

TEST_CASE("eta subcommand reports both routes and their gap") {
    CliResult r = run({"eta", "--expr", kBandExpr, "--grid", "64", "--p0", "0", "--levels", "256"});
    REQUIRE(r.code == 0);
    double direct = line_value(r.out, "eta");
    double oracle = line_value(r.out, "eta_oracle");
    double gap = line_value(r.out, "gap");
    CHECK(std::fabs(direct - 1.0) <= 2e-2);
    CHECK(std::fabs(direct - oracle - gap) <= 1e-9);
    CHECK(std::fabs(gap) <= 2e-2);
}

TEST_CASE("hofer subcommand prints a consistent decomposition") {
    CliResult r = run({"hofer", "--expr", "0.9*bump(p,0.1,0.15)-0.6*bump(p,-0.15,0.12)",
                       "--grid", "64"});
    REQUIRE(r.code == 0);
    double cp = line_value(r.out, "c_plus");
    double cm = line_value(r.out, "c_minus");
    double h = line_value(r.out, "hofer_asymptotic");
    CHECK(std::fabs(h - (cp - cm)) <= 1e-9);
    CHECK(std::fabs(cp - 0.9) <= 2e-2);
    CHECK(std::fabs(cm + 0.6) <= 2e-2);
}

TEST_CASE("reeb subcommand emits dot and labeled json") {
    std::vector<std::string> base = {"reeb", "--expr",
                                     "bump(p,0,0.25)*(1+0.4*cos(2*pi*q))+0.5*bump(p,0.05,0.1)",
                                     "--grid", "128"};
    CliResult dot = run(base);
    REQUIRE(dot.code == 0);
    CHECK(dot.out.find("digraph") != std::string::npos);
    CHECK(dot.out.find("v-") != std::string::npos);
    CHECK(dot.out.find("v+") != std::string::npos);

    std::vector<std::string> jargs = base;
    jargs.push_back("--format");
    jargs.push_back("json");
    CliResult js = run(jargs);
    REQUIRE(js.code == 0);
    nlohmann::json arr = nlohmann::json::parse(js.out);
    REQUIRE(arr.is_array());
    CHECK(arr.front()["kind"] == "terminal_minus");
    CHECK(arr.back()["kind"] == "terminal_plus");
}

TEST_CASE("qintegral with the winding measure equals the eta oracle") {
    CliResult qi = run({"qintegral", "--kind", "tau_p0", "--p0", "0", "--expr", kBandExpr,
                        "--grid", "64", "--levels", "256"});
    REQUIRE(qi.code == 0);
    CliResult et = run({"eta", "--expr", kBandExpr, "--grid", "64", "--p0", "0",
                        "--levels", "256"});
    REQUIRE(et.code == 0);
    double v = std::stod(qi.out);
    CHECK(v == doctest::Approx(line_value(et.out, "eta_oracle")).epsilon(1e-12));
}

TEST_CASE("measure subcommand evaluates a region descriptor file") {
    GridSpec gs{64, 64, -0.5, 0.5, Space::cylinder};
    TempFile region("symh_test_region.json", region_to_json(make_band_region(gs, 0.1, 0.2)));
    CliResult r = run({"measure", "--kind", "tau_p0", "--p0", "0.15",
                       "--region", region.path.string()});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out) == 1.0);

    CliResult miss = run({"measure", "--kind", "tau_p0", "--p0", "0.4",
                          "--region", region.path.string()});
    REQUIRE(miss.code == 0);
    CHECK(std::stod(miss.out) == 0.0);
}

TEST_CASE("field files round trip through the cli") {
    GridSpec gs{64, 64, -0.5, 0.5, Space::cylinder};
    CylinderField f{gs, std::vector<double>(gs.cells(), 0.0)};
    for (int j = 0; j < gs.np; ++j) {
        double v = bump_profile(gs.p_center(j), 0.0, 0.2);
        for (int i = 0; i < gs.nq; ++i) f.at(i, j) = v;
    }
    TempFile field("symh_test_field.json", field_to_json(f));
    auto out_path = std::filesystem::temp_directory_path() / "symh_test_profile.csv";

    CliResult r = run({"homog", "--field", field.path.string(), "--format", "csv",
                       "--out", out_path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::string csv = load_text_file(out_path.string());
    CHECK(csv.rfind("p,value\n", 0) == 0);
    std::remove(out_path.string().c_str());

    // the same field drives eta through the file route; values may differ
    // only by the 12-digit quantization of the stored samples
    CliResult by_file = run({"eta", "--field", field.path.string(), "--p0", "0"});
    CliResult by_expr = run({"eta", "--expr", kBandExpr, "--grid", "64", "--p0", "0"});
    REQUIRE(by_file.code == 0);
    REQUIRE(by_expr.code == 0);
    CHECK(line_value(by_file.out, "eta") ==
          doctest::Approx(line_value(by_expr.out, "eta")).epsilon(1e-9));
    CHECK(line_value(by_file.out, "eta_oracle") ==
          doctest::Approx(line_value(by_expr.out, "eta_oracle")).epsilon(1e-9));
}

TEST_CASE("gamma0 subcommand prints the solved parameters as json") {
    CliResult r = run({"gamma0", "--n", "2", "--eps", "0.05", "--rho2", "0.615088",
                       "--alpha", "0.3"});
    REQUIRE(r.code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 2);
    CHECK(j["alpha"] == 0.3);
    CHECK(std::fabs(j["rho1"].get<double>() - 0.0990) <= 1e-3);
    CHECK(j["residual"].get<double>() <= 1e-12);
    CHECK(j["curve_area_dev"].get<double>() <= 1e-6);
}

TEST_CASE("compare subcommand is byte identical across thread counts") {
    std::vector<std::string> base = {"compare", "--r", "0.2", "--grid", "64", "--corpus", "3",
                                     "--seed", "5", "--levels", "128"};
    std::vector<std::string> one = base, many = base;
    one.push_back("--threads");
    one.push_back("1");
    many.push_back("--threads");
    many.push_back("4");
    CliResult a = run(one);
    CliResult b = run(many);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);

    nlohmann::json j = nlohmann::json::parse(a.out);
    CHECK(j.contains("verdict"));
    REQUIRE(j["per_field"].is_array());
    CHECK(j["per_field"].size() == 3);
}
