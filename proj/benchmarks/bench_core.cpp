#include "symh/contour.hpp"
#include "symh/field.hpp"
#include "symh/homog.hpp"
#include "symh/reeb.hpp"
#include "symh/tmeasure.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace {

using namespace symh;

// wavy band with one ridge maximum and one valley saddle; nice by
// construction (phase and skew break the grid mirror symmetries)
CylinderField test_band(int n) {
    GridSpec gs{n, n, -0.5, 0.5, Space::cylinder};
    CylinderField f{gs, std::vector<double>(gs.cells(), 0.0)};
    for (int j = 0; j < gs.np; ++j) {
        double p = gs.p_center(j);
        double w = bump_profile(p, 0.0, 0.25) * (1.0 + 0.2 * p);
        double chi = smoothstep01(((0.25 - std::fabs(p)) / 0.25) * 4.0 - 1.0);
        for (int i = 0; i < gs.nq; ++i) {
            double q = gs.q_center(i);
            f.at(i, j) = w * (1.0 + 0.25 * chi * std::cos(2 * std::numbers::pi * q + 0.9));
        }
    }
    return f;
}

// two-lobe field that is not nice, exercising the perturbation retries
CylinderField two_lobe(int n) {
    GridSpec gs{n, n, -0.5, 0.5, Space::cylinder};
    CylinderField f{gs, std::vector<double>(gs.cells(), 0.0)};
    for (int j = 0; j < gs.np; ++j) {
        double p = gs.p_center(j);
        double w = 0.9 * bump_profile(p, 0.1, 0.15) - 0.6 * bump_profile(p, -0.15, 0.12);
        for (int i = 0; i < gs.nq; ++i) f.at(i, j) = w;
    }
    return f;
}

void bm_superlevel_components(benchmark::State& state) {
    auto f = std::make_shared<const CylinderField>(test_band(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        Region r = superlevel_region(f, 0.4);
        auto cd = components(r);
        benchmark::DoNotOptimize(cd.components.size());
    }
}

void bm_build_reeb(benchmark::State& state) {
    CylinderField f = test_band(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ReebGraph g = build_reeb(f);
        benchmark::DoNotOptimize(g.nodes.size());
    }
}

void bm_homogenize(benchmark::State& state) {
    CylinderField f = test_band(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        HomogenizedProfile h = homogenize(f);
        benchmark::DoNotOptimize(h.values.size());
    }
}

void bm_homogenize_general(benchmark::State& state) {
    CylinderField f = two_lobe(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        HomogenizedProfile h = homogenize_general(f);
        benchmark::DoNotOptimize(h.values.size());
    }
}

void bm_quasi_integral(benchmark::State& state) {
    CylinderField f = test_band(128);
    TauP0 tm(0.0);
    for (auto _ : state) {
        double v = quasi_integral(tm, f, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(v);
    }
}

void bm_eta_oracle_build(benchmark::State& state) {
    CylinderField f = test_band(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        EtaOracle oracle(f, 256);
        benchmark::DoNotOptimize(oracle.eval(0.0));
    }
}

BENCHMARK(bm_superlevel_components)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_build_reeb)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_homogenize)->Arg(64)->Arg(128);
BENCHMARK(bm_homogenize_general)->Arg(64)->Arg(128);
BENCHMARK(bm_quasi_integral)->Arg(64)->Arg(256);
BENCHMARK(bm_eta_oracle_build)->Arg(64)->Arg(128);

} // namespace

BENCHMARK_MAIN();
