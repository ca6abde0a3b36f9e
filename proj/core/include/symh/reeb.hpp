#pragma once

#include "symh/field.hpp"

#include <string>
#include <vector>

namespace symh {

// Virtual terminal cells compactifying the two ends of the cylinder.
constexpr long kVMinusCell = -2;
constexpr long kVPlusCell = -1;

// Node of the reduced contour tree: a critical cell, or a terminal.
struct ReebNode {
    long cell;    // flattened grid index, or kVMinusCell / kVPlusCell
    double value; // field value (0 at terminals)
};

// Arc between nodes; lo is the symbolically smaller endpoint.
struct ReebArc {
    int lo;
    int hi;
};

struct ReebGraph {
    GridSpec spec;
    std::vector<ReebNode> nodes;
    std::vector<ReebArc> arcs;
    int v_minus = -1;
    int v_plus = -1;
    double p_prime = 0;  // lower edge of the tight support band
    double p_dprime = 0; // upper edge
};

// Contour tree of the nice field over the compactified cylinder, reduced to
// critical nodes. Throws if the field is not nice or its support touches the
// grid boundary.
ReebGraph build_reeb(const CylinderField& f);

// Unique tree path from v_minus to v_plus (node ids, terminals included).
std::vector<int> gamma0_path(const ReebGraph& g);

// One point of the labeled walk along the path. Edge points carry a single
// sampled level; vertex points carry the closed interval [label_lo,label_hi]
// obtained as limits of the adjacent edge samples; terminals carry
// (-inf, p'] and [p'', +inf).
struct LabeledPoint {
    enum class Kind { terminal_minus, terminal_plus, vertex, edge };
    Kind kind;
    double f_value;
    double label_lo;
    double label_hi;
    int node = -1; // vertex/terminal points
    int arc = -1;  // edge points: index into the path, 0 = first arc
};

struct LabeledPath {
    std::vector<LabeledPoint> points; // path order, terminal_minus first
    double p_prime = 0;
    double p_dprime = 0;
};

// Samples the levels of the non-contractible circles along each path arc.
// n_samples_min is the per-arc floor; sampling density also scales with the
// arc's value span, and extra samples cluster geometrically toward the arc
// endpoints to approximate the vertex label limits.
LabeledPath label_path(const ReebGraph& g, const std::vector<int>& path,
                       const CylinderField& f, int n_samples_min = 16, int threads = 1);

struct IotaPoint {
    double f_value;
    LabeledPoint::Kind kind;
    int point_index; // index into lp.points (lower bracket for edge hits)
};

// The point of the labeled path whose label contains p0; ties at label
// boundaries resolve to the vertex.
IotaPoint iota(const LabeledPath& lp, double p0);

std::string export_dot(const ReebGraph& g);
std::string labeled_path_to_json(const LabeledPath& lp);

} // namespace symh
