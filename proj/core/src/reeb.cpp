#include "symh/reeb.hpp"
#include "symh/contour.hpp"
#include "symh/errors.hpp"
#include "symh/io.hpp"
#include "symh/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace symh {

namespace {

// Vertex complex: the support band plus one zero row on each side, and two
// virtual terminals standing for the lower and upper ends of the cylinder.
struct Complex {
    const CylinderField* f;
    int nq, np;
    int rlo, rhi; // included zero rows
    int rows;
    int vm, vp; // vertex ids of the terminals
    int n;      // total vertex count

    int id(int i, int j) const { return (j - rlo) * nq + i; }
    bool is_cell(int v) const { return v < vm; }
    int ci(int v) const { return v % nq; }
    int cj(int v) const { return v / nq + rlo; }

    double value(int v) const {
        if (v == vm || v == vp) return 0;
        return f->at(ci(v), cj(v));
    }
    long symidx(int v) const {
        if (v == vm) return kVMinusCell;
        if (v == vp) return kVPlusCell;
        return static_cast<long>(f->spec.index(ci(v), cj(v)));
    }
    bool symb_less(int a, int b) const {
        double va = value(a), vb = value(b);
        if (va != vb) return va < vb;
        return symidx(a) < symidx(b);
    }

    template <typename Fn>
    void for_neighbors(int v, bool conn8, Fn&& fn) const {
        if (v == vm) {
            for (int i = 0; i < nq; ++i) fn(id(i, rlo));
            return;
        }
        if (v == vp) {
            for (int i = 0; i < nq; ++i) fn(id(i, rhi));
            return;
        }
        int i = ci(v), j = cj(v);
        int ie = (i + 1) % nq, iw = (i + nq - 1) % nq;
        fn(id(ie, j));
        fn(id(iw, j));
        if (j + 1 <= rhi) {
            fn(id(i, j + 1));
            if (conn8) {
                fn(id(ie, j + 1));
                fn(id(iw, j + 1));
            }
        } else {
            fn(vp);
        }
        if (j - 1 >= rlo) {
            fn(id(i, j - 1));
            if (conn8) {
                fn(id(ie, j - 1));
                fn(id(iw, j - 1));
            }
        } else {
            fn(vm);
        }
    }
};

struct PlainUF {
    std::vector<int> parent;
    explicit PlainUF(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Sweep in the given symbolic order; link[v] = the vertex at which the
// component whose extremum chain ends at v merges with another component.
std::vector<int> sweep_tree(const Complex& cx, const std::vector<int>& order, bool conn8) {
    std::vector<int> link(cx.n, -1);
    std::vector<std::uint8_t> active(cx.n, 0);
    std::vector<int> lowest(cx.n, -1);
    PlainUF uf(cx.n);
    for (int v : order) {
        active[v] = 1;
        lowest[uf.find(v)] = v;
        cx.for_neighbors(v, conn8, [&](int u) {
            if (!active[u]) return;
            int ru = uf.find(u);
            int rv = uf.find(v);
            if (ru == rv) return;
            link[lowest[ru]] = v;
            uf.unite(ru, rv);
            lowest[uf.find(v)] = v;
        });
    }
    return link;
}

// Intrusive child lists for the merge phase splices.
struct ChildLists {
    std::vector<int> head, prev, next, count;
    explicit ChildLists(int n) : head(n, -1), prev(n, -1), next(n, -1), count(n, 0) {}
    void build(const std::vector<int>& link) {
        for (int v = 0; v < static_cast<int>(link.size()); ++v) {
            int u = link[v];
            if (u < 0) continue;
            next[v] = head[u];
            if (head[u] >= 0) prev[head[u]] = v;
            head[u] = v;
            prev[v] = -1;
            ++count[u];
        }
    }
    void remove(int parent, int v) {
        if (prev[v] >= 0) next[prev[v]] = next[v];
        else head[parent] = next[v];
        if (next[v] >= 0) prev[next[v]] = prev[v];
        prev[v] = next[v] = -1;
        --count[parent];
    }
    void replace(int parent, int v, int c) {
        next[c] = next[v];
        prev[c] = prev[v];
        if (prev[v] >= 0) next[prev[v]] = c;
        else head[parent] = c;
        if (next[v] >= 0) prev[next[v]] = c;
        prev[v] = next[v] = -1;
    }
};

} // namespace

ReebGraph build_reeb(const CylinderField& f) {
    NiceReport nr = check_nice(f);
    if (!nr.is_nice) {
        std::string msg = "field is not nice:";
        for (std::size_t k = 0; k < nr.violations.size() && k < 3; ++k)
            msg += " " + nr.violations[k] + ";";
        throw domain_error(msg);
    }
    auto rows = f.support_rows();
    if (!rows) throw domain_error("zero field has no contour structure");
    auto [jlo, jhi] = *rows;
    if (jlo < 1 || jhi > f.spec.np - 2)
        throw domain_error("support touches the grid boundary");

    Complex cx;
    cx.f = &f;
    cx.nq = f.spec.nq;
    cx.np = f.spec.np;
    cx.rlo = jlo - 1;
    cx.rhi = jhi + 1;
    cx.rows = cx.rhi - cx.rlo + 1;
    cx.vm = cx.rows * cx.nq;
    cx.vp = cx.vm + 1;
    cx.n = cx.vm + 2;

    std::vector<int> asc(cx.n);
    for (int v = 0; v < cx.n; ++v) asc[v] = v;
    std::sort(asc.begin(), asc.end(), [&](int a, int b) { return cx.symb_less(a, b); });
    std::vector<int> desc(asc.rbegin(), asc.rend());

    // join tree over superlevel sets (4-connected), split tree over sublevel
    // sets (8-connected)
    std::vector<int> jdown = sweep_tree(cx, desc, false);
    std::vector<int> sup = sweep_tree(cx, asc, true);

    ChildLists jc(cx.n), sc(cx.n);
    jc.build(jdown);
    sc.build(sup);

    auto upper_ok = [&](int v) { return jc.count[v] == 0 && sc.count[v] <= 1; };
    auto lower_ok = [&](int v) { return sc.count[v] == 0 && jc.count[v] <= 1; };

    // deterministic pluck order: always the symbolically smallest candidate
    auto heap_less = [&](int a, int b) { return cx.symb_less(b, a); };
    std::priority_queue<int, std::vector<int>, decltype(heap_less)> heap(heap_less);
    std::vector<std::uint8_t> plucked(cx.n, 0);
    for (int v = 0; v < cx.n; ++v)
        if (upper_ok(v) || lower_ok(v)) heap.push(v);

    std::vector<std::pair<int, int>> ct_arcs;
    ct_arcs.reserve(cx.n - 1);
    int remaining = cx.n;

    while (remaining > 1) {
        if (heap.empty()) throw domain_error("contour tree merge stalled");
        int v = heap.top();
        heap.pop();
        if (plucked[v]) continue;
        bool up = upper_ok(v);
        if (!up && !lower_ok(v)) continue; // duplicate heap entry
        std::vector<int> touched;
        if (up) {
            // while more than one vertex is live the join tree is a tree on
            // all of them, so a join leaf always has a down-link
            int w = jdown[v];
            if (w < 0) throw domain_error("contour tree merge inconsistency");
            ct_arcs.emplace_back(v, w);
            jc.remove(w, v);
            touched.push_back(w);
            int u = sup[v];
            if (sc.count[v] == 1) {
                int c = sc.head[v];
                sup[c] = u;
                if (u >= 0) sc.replace(u, v, c);
                touched.push_back(c);
            } else if (u >= 0) {
                sc.remove(u, v);
                touched.push_back(u);
            }
        } else {
            int w = sup[v];
            if (w < 0) throw domain_error("contour tree merge inconsistency");
            ct_arcs.emplace_back(v, w);
            sc.remove(w, v);
            touched.push_back(w);
            int u = jdown[v];
            if (jc.count[v] == 1) {
                int c = jc.head[v];
                jdown[c] = u;
                if (u >= 0) jc.replace(u, v, c);
                touched.push_back(c);
            } else if (u >= 0) {
                jc.remove(u, v);
                touched.push_back(u);
            }
        }
        plucked[v] = 1;
        --remaining;
        for (int w : touched)
            if (!plucked[w] && (upper_ok(w) || lower_ok(w))) heap.push(w);
    }

    if (ct_arcs.size() != static_cast<std::size_t>(cx.n) - 1)
        throw domain_error("contour tree is not a tree");

    // reduce: keep terminals and every vertex whose up/down degree is not 1/1
    std::vector<int> updeg(cx.n, 0), downdeg(cx.n, 0);
    std::vector<std::vector<int>> adj(cx.n);
    for (auto& [a, b] : ct_arcs) {
        adj[a].push_back(b);
        adj[b].push_back(a);
        if (cx.symb_less(a, b)) {
            ++updeg[a];
            ++downdeg[b];
        } else {
            ++updeg[b];
            ++downdeg[a];
        }
    }
    for (auto& l : adj) std::sort(l.begin(), l.end()); // deterministic walks

    std::vector<std::uint8_t> keep(cx.n, 0);
    for (int v = 0; v < cx.n; ++v)
        keep[v] = (v == cx.vm || v == cx.vp || updeg[v] != 1 || downdeg[v] != 1) ? 1 : 0;

    ReebGraph g;
    g.spec = f.spec;
    g.p_prime = f.spec.p_edge(jlo);
    g.p_dprime = f.spec.p_edge(jhi + 1);

    std::vector<int> node_of(cx.n, -1);
    for (int v : asc) {
        if (!keep[v]) continue;
        node_of[v] = static_cast<int>(g.nodes.size());
        long cell = cx.is_cell(v) ? static_cast<long>(f.spec.index(cx.ci(v), cx.cj(v)))
                                  : (v == cx.vm ? kVMinusCell : kVPlusCell);
        g.nodes.push_back({cell, cx.value(v)});
    }
    g.v_minus = node_of[cx.vm];
    g.v_plus = node_of[cx.vp];

    // walk maximal regular chains between kept vertices
    std::vector<std::uint8_t> arc_used(ct_arcs.size(), 0);
    std::vector<std::vector<std::pair<int, std::size_t>>> inc(cx.n); // (other, arc idx)
    for (std::size_t k = 0; k < ct_arcs.size(); ++k) {
        inc[ct_arcs[k].first].emplace_back(ct_arcs[k].second, k);
        inc[ct_arcs[k].second].emplace_back(ct_arcs[k].first, k);
    }
    for (auto& l : inc) std::sort(l.begin(), l.end());

    for (int v : asc) {
        if (!keep[v]) continue;
        for (auto& [first_nbr, first_arc] : inc[v]) {
            if (arc_used[first_arc]) continue;
            arc_used[first_arc] = 1;
            int cur = first_nbr;
            while (!keep[cur]) {
                // a regular vertex has exactly two incident arcs; the one we
                // arrived through is already marked
                std::size_t step_arc = 0;
                int nxt = -1;
                for (auto& [w, ak] : inc[cur]) {
                    if (arc_used[ak]) continue;
                    nxt = w;
                    step_arc = ak;
                    break;
                }
                if (nxt < 0) throw domain_error("broken chain in contour tree reduction");
                arc_used[step_arc] = 1;
                cur = nxt;
            }
            int a = node_of[v], b = node_of[cur];
            // orient by symbolic order of the kept endpoints
            bool a_less = cx.symb_less(v, cur);
            g.arcs.push_back(a_less ? ReebArc{a, b} : ReebArc{b, a});
        }
    }

    if (g.arcs.size() != g.nodes.size() - 1) throw domain_error("reduced graph is not a tree");
    {
        PlainUF check(static_cast<int>(g.nodes.size()));
        for (auto& a : g.arcs) check.unite(a.lo, a.hi);
        int root = check.find(0);
        for (int k = 1; k < static_cast<int>(g.nodes.size()); ++k)
            if (check.find(k) != root) throw domain_error("reduced graph is disconnected");
    }
    if (g.nodes.size() < 3)
        throw domain_error("degenerate contour tree (only terminals survive)");

    int deg_minus = 0, deg_plus = 0;
    for (auto& a : g.arcs) {
        if (a.lo == g.v_minus || a.hi == g.v_minus) ++deg_minus;
        if (a.lo == g.v_plus || a.hi == g.v_plus) ++deg_plus;
    }
    if (deg_minus != 1 || deg_plus != 1)
        throw domain_error("terminal node is not a leaf (resolution failure)");

    // deterministic arc order
    std::sort(g.arcs.begin(), g.arcs.end(), [](const ReebArc& x, const ReebArc& y) {
        return std::tie(x.lo, x.hi) < std::tie(y.lo, y.hi);
    });
    return g;
}

std::vector<int> gamma0_path(const ReebGraph& g) {
    int n = static_cast<int>(g.nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (auto& a : g.arcs) {
        adj[a.lo].push_back(a.hi);
        adj[a.hi].push_back(a.lo);
    }
    std::vector<int> parent(n, -1);
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(g.v_minus);
    seen[g.v_minus] = 1;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int w : adj[v]) {
            if (seen[w]) continue;
            seen[w] = 1;
            parent[w] = v;
            bfs.push(w);
        }
    }
    if (!seen[g.v_plus]) throw domain_error("terminals are not connected");
    std::vector<int> path;
    for (int v = g.v_plus; v >= 0; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

namespace {

struct PathArc {
    double vlo = 0, vhi = 0; // real value interval
    bool increasing = true;  // whether f rises along the path direction
    std::vector<std::pair<double, double>> samples; // (t, level), t ascending
};

} // namespace

LabeledPath label_path(const ReebGraph& g, const std::vector<int>& path,
                       const CylinderField& f, int n_samples_min, int threads) {
    if (path.size() < 2 || path.front() != g.v_minus || path.back() != g.v_plus)
        throw domain_error("label_path expects the terminal-to-terminal path");
    if (n_samples_min < 8) throw domain_error("need at least 8 samples per edge");

    const int n_arcs = static_cast<int>(path.size()) - 1;
    const double fmin = f.min_value(), fmax = f.max_value();
    const double value_res = (fmax - fmin) / 4096.0;
    const double dp = f.spec.dp();

    std::vector<PathArc> arcs(n_arcs);
    std::vector<double> ts;
    for (int k = 0; k < n_arcs; ++k) {
        double v0 = g.nodes[path[k]].value;
        double v1 = g.nodes[path[k + 1]].value;
        arcs[k].vlo = std::min(v0, v1);
        arcs[k].vhi = std::max(v0, v1);
        arcs[k].increasing = v1 > v0;
        double span = arcs[k].vhi - arcs[k].vlo;
        if (span <= 0) continue; // plateau arc, nothing to sample
        int n = n_samples_min;
        if (value_res > 0)
            n = std::clamp(static_cast<int>(std::ceil(span / (2 * value_res))), n_samples_min, 160);
        for (int i = 0; i < n; ++i) ts.push_back(arcs[k].vlo + span * (i + 0.5) / n);
        // geometric clustering toward the endpoints approximates the vertex
        // label limits
        for (int e = 2; e <= 20; ++e) {
            double d = span * std::ldexp(1.0, -e);
            if (d <= 0) break;
            if (arcs[k].vlo + d < arcs[k].vhi) ts.push_back(arcs[k].vlo + d);
            if (arcs[k].vhi - d > arcs[k].vlo) ts.push_back(arcs[k].vhi - d);
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    // never sample exactly at a path vertex value
    {
        std::vector<double> node_vals;
        for (int v : path) node_vals.push_back(g.nodes[v].value);
        std::sort(node_vals.begin(), node_vals.end());
        ts.erase(std::remove_if(ts.begin(), ts.end(),
                                [&](double t) {
                                    return std::binary_search(node_vals.begin(), node_vals.end(), t);
                                }),
                 ts.end());
    }

    auto fshared = std::make_shared<CylinderField>(f);
    std::vector<std::vector<double>> levels_at =
        parallel_blocks<std::vector<double>>(ts.size(), 8, threads, [&](std::size_t idx) {
            Region r = superlevel_region(fshared, ts[idx]);
            std::vector<double> levels;
            for (const auto& c : boundary_circles(r)) {
                if (c.winding != 1 && c.winding != -1) continue;
                if (c.on_grid_edge) continue;
                levels.push_back(level_of_circle(c));
            }
            std::sort(levels.begin(), levels.end());
            return levels;
        });

    for (std::size_t idx = 0; idx < ts.size(); ++idx) {
        double t = ts[idx];
        std::vector<int> expect;
        for (int k = 0; k < n_arcs; ++k)
            if (arcs[k].vlo < t && t < arcs[k].vhi) expect.push_back(k);
        const auto& levels = levels_at[idx];
        if (levels.size() != expect.size())
            throw domain_error("level structure mismatch at t = " + format_double(t) +
                               ": expected " + std::to_string(expect.size()) +
                               " non-contractible circles, found " + std::to_string(levels.size()));
        // ascending levels correspond to the arcs in path order
        for (std::size_t j = 0; j < expect.size(); ++j)
            arcs[expect[j]].samples.emplace_back(t, levels[j]);
    }

    LabeledPath lp;
    lp.p_prime = g.p_prime;
    lp.p_dprime = g.p_dprime;
    const double inf = std::numeric_limits<double>::infinity();

    lp.points.push_back({LabeledPoint::Kind::terminal_minus, 0.0, -inf, g.p_prime, path.front(), -1});
    for (int k = 0; k < n_arcs; ++k) {
        auto& a = arcs[k];
        // samples are already t-ascending; path order may be the reverse
        std::vector<std::pair<double, double>> ordered = a.samples;
        if (!a.increasing) std::reverse(ordered.begin(), ordered.end());
        for (auto& [t, level] : ordered)
            lp.points.push_back({LabeledPoint::Kind::edge, t, level, level, -1, k});
        if (k + 1 < n_arcs) {
            // vertex label limits from the nearest samples on each side
            int node = path[k + 1];
            double fv = g.nodes[node].value;
            std::vector<double> limits;
            if (!a.samples.empty())
                limits.push_back(a.increasing ? a.samples.back().second : a.samples.front().second);
            const auto& b = arcs[k + 1];
            if (!b.samples.empty())
                limits.push_back(b.increasing ? b.samples.front().second : b.samples.back().second);
            double lo, hi;
            if (limits.empty()) {
                // plateau vertex with no sampled neighbors: pin to the level
                // reached so far
                double prev = lp.points.back().label_hi;
                if (!std::isfinite(prev)) prev = g.p_prime;
                lo = hi = prev;
            } else {
                lo = *std::min_element(limits.begin(), limits.end());
                hi = *std::max_element(limits.begin(), limits.end());
            }
            lp.points.push_back({LabeledPoint::Kind::vertex, fv, lo, hi, node, -1});
        }
    }
    lp.points.push_back({LabeledPoint::Kind::terminal_plus, 0.0, g.p_dprime, inf, path.back(), -1});

    // levels must be non-decreasing along the path; clamp sampling noise and
    // reject genuine violations
    double slack = 3 * dp;
    double running = g.p_prime;
    for (auto& pt : lp.points) {
        if (pt.kind == LabeledPoint::Kind::terminal_minus ||
            pt.kind == LabeledPoint::Kind::terminal_plus)
            continue;
        for (double* l : {&pt.label_lo, &pt.label_hi}) {
            double v = std::clamp(*l, g.p_prime, g.p_dprime);
            if (v < running - slack)
                throw domain_error("levels along the path are not monotone near p = " +
                                   format_double(v));
            v = std::max(v, running);
            *l = v;
            running = v;
        }
    }
    if (running > g.p_dprime + slack)
        throw domain_error("path levels overshoot the support band");
    return lp;
}

IotaPoint iota(const LabeledPath& lp, double p0) {
    if (lp.points.size() < 2) throw domain_error("empty labeled path");
    if (p0 <= lp.p_prime)
        return {0.0, LabeledPoint::Kind::terminal_minus, 0};
    if (p0 >= lp.p_dprime)
        return {0.0, LabeledPoint::Kind::terminal_plus, static_cast<int>(lp.points.size()) - 1};
    // closed vertex labels win ties at their boundaries
    for (std::size_t k = 0; k < lp.points.size(); ++k) {
        const auto& pt = lp.points[k];
        if (pt.kind != LabeledPoint::Kind::vertex) continue;
        if (pt.label_lo <= p0 && p0 <= pt.label_hi)
            return {pt.f_value, LabeledPoint::Kind::vertex, static_cast<int>(k)};
    }
    for (std::size_t k = 0; k + 1 < lp.points.size(); ++k) {
        const auto& a = lp.points[k];
        const auto& b = lp.points[k + 1];
        double la = a.label_hi, lb = b.label_lo;
        if (a.kind == LabeledPoint::Kind::terminal_minus) la = lp.p_prime;
        if (b.kind == LabeledPoint::Kind::terminal_plus) lb = lp.p_dprime;
        if (!(la <= p0 && p0 <= lb)) continue;
        double fa = a.kind == LabeledPoint::Kind::terminal_minus ? 0.0 : a.f_value;
        double fb = b.kind == LabeledPoint::Kind::terminal_plus ? 0.0 : b.f_value;
        double fv = lb > la ? fa + (fb - fa) * (p0 - la) / (lb - la) : fa;
        return {fv, LabeledPoint::Kind::edge, static_cast<int>(k)};
    }
    throw domain_error("labels do not cover p0 = " + format_double(p0));
}

std::string export_dot(const ReebGraph& g) {
    std::string out = "digraph reeb {\n  rankdir=BT;\n";
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const auto& n = g.nodes[k];
        std::string label;
        if (n.cell == kVMinusCell) label = "v-";
        else if (n.cell == kVPlusCell) label = "v+";
        else {
            int i = static_cast<int>(n.cell / g.spec.np);
            int j = static_cast<int>(n.cell % g.spec.np);
            label = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        }
        out += "  n" + std::to_string(k) + " [label=\"" + label + "\" value=\"" +
               format_double(n.value) + "\"];\n";
    }
    for (const auto& a : g.arcs)
        out += "  n" + std::to_string(a.lo) + " -> n" + std::to_string(a.hi) + ";\n";
    out += "}\n";
    return out;
}

std::string labeled_path_to_json(const LabeledPath& lp) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    auto enc = [](double v) -> nlohmann::ordered_json {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        return quantize12(v);
    };
    for (const auto& pt : lp.points) {
        nlohmann::ordered_json e;
        switch (pt.kind) {
            case LabeledPoint::Kind::terminal_minus: e["kind"] = "terminal_minus"; break;
            case LabeledPoint::Kind::terminal_plus: e["kind"] = "terminal_plus"; break;
            case LabeledPoint::Kind::vertex: e["kind"] = "vertex"; break;
            case LabeledPoint::Kind::edge: e["kind"] = "edge"; break;
        }
        e["f_value"] = quantize12(pt.f_value);
        e["label"] = {enc(pt.label_lo), enc(pt.label_hi)};
        arr.push_back(e);
    }
    return arr.dump();
}

} // namespace symh
