#pragma once

#include "symh/expression.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symh {

enum class Space { cylinder, sphere };

// Uniform cell-centered grid on S^1 x [p_min, p_max]. q lives on [0,1) and
// wraps; the sphere uses cylindrical area-true coordinates with
// p in [-1/2, 1/2], so cell areas sum to exactly 1 there.
struct GridSpec {
    int nq = 0;
    int np = 0;
    double p_min = 0;
    double p_max = 0;
    Space space = Space::cylinder;

    void validate() const;

    double dq() const { return 1.0 / nq; }
    double dp() const { return (p_max - p_min) / np; }
    double cell_area() const { return dq() * dp(); }
    double q_center(int i) const { return (i + 0.5) / nq; }
    double p_center(int j) const { return p_min + (j + 0.5) * dp(); }
    // lower edge of row j
    double p_edge(int j) const { return p_min + j * dp(); }
    std::size_t cells() const { return static_cast<std::size_t>(nq) * np; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * np + j; }

    bool operator==(const GridSpec&) const = default;
};

inline constexpr double kSupportTol = 1e-12;

// Sampled scalar field; values are stored q-major (index = i*np + j).
struct CylinderField {
    GridSpec spec;
    std::vector<double> values;

    double at(int i, int j) const { return values[spec.index(i, j)]; }
    double& at(int i, int j) { return values[spec.index(i, j)]; }

    // periodic bilinear-in-q lookup at (q, row j)
    double interp_q(double q, int j) const;

    // tight support rows: smallest [j_lo, j_hi] with |values| > tol outside it empty
    std::optional<std::pair<int, int>> support_rows(double tol = kSupportTol) const;
    // support band [p', p''] as row edges; nullopt for an all-zero field
    std::optional<std::pair<double, double>> support_band(double tol = kSupportTol) const;

    double min_value() const;
    double max_value() const;
    // field value carried to a sphere pole: mean of the adjacent grid row
    double pole_value(bool south) const;

    double grid_integral() const;
};

struct NiceReport {
    bool is_nice = false;
    double delta = 0; // width of the q-independent collars, in p units
    struct CriticalCell {
        int i = 0, j = 0;
        enum class Type { minimum, maximum, saddle } type = Type::maximum;
        double value = 0;
    };
    std::vector<CriticalCell> critical_cells;
    std::vector<std::string> violations;
};

// compactly supported shear (q,p) -> (q + s(p), p); profile sampled per row
struct ShearMap {
    std::vector<double> profile; // one value per grid row
};

CylinderField sample_field(const Expression& expr, const GridSpec& spec);
CylinderField apply_shear(const CylinderField& f, const ShearMap& m);
NiceReport check_nice(const CylinderField& f, double tol = 1e-9);
std::pair<CylinderField, CylinderField> pos_neg_split(const CylinderField& f);

// f + g, f*scale and friends used all over the tests
CylinderField field_scale(const CylinderField& f, double s);
CylinderField field_add(const CylinderField& a, const CylinderField& b);
// composition phi(f) for sampled phi given as a callable
template <typename Fn>
CylinderField field_map(const CylinderField& f, Fn&& fn) {
    CylinderField out = f;
    for (auto& v : out.values) v = fn(v);
    return out;
}

} // namespace symh
