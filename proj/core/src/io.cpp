#include "symh/io.hpp"
#include "symh/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace symh {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double quantize12(double v) {
    return std::strtod(format_double(v).c_str(), nullptr);
}

namespace {

GridSpec spec_from_json(const ordered_json& j) {
    GridSpec g;
    g.nq = j.at("nq").get<int>();
    g.np = j.at("np").get<int>();
    g.p_min = j.at("p_min").get<double>();
    g.p_max = j.at("p_max").get<double>();
    std::string space = j.at("space").get<std::string>();
    if (space == "cylinder") g.space = Space::cylinder;
    else if (space == "sphere") g.space = Space::sphere;
    else throw domain_error("unknown space tag: " + space);
    g.validate();
    return g;
}

void spec_to_json(const GridSpec& g, ordered_json& j) {
    j["nq"] = g.nq;
    j["np"] = g.np;
    j["p_min"] = g.p_min;
    j["p_max"] = g.p_max;
    j["space"] = g.space == Space::cylinder ? "cylinder" : "sphere";
}

ordered_json parse_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw domain_error("malformed JSON input");
    return j;
}

} // namespace

std::string field_to_json(const CylinderField& f) {
    ordered_json j;
    spec_to_json(f.spec, j);
    j["values"] = f.values;
    return j.dump();
}

CylinderField field_from_json(const std::string& text) {
    ordered_json j = parse_json(text);
    CylinderField f;
    try {
        f.spec = spec_from_json(j);
        f.values = j.at("values").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("field JSON: ") + e.what());
    }
    if (f.values.size() != f.spec.cells())
        throw domain_error("field JSON: values length " + std::to_string(f.values.size()) +
                           " does not match nq*np = " + std::to_string(f.spec.cells()));
    for (double v : f.values)
        if (!std::isfinite(v)) throw domain_error("field JSON: non-finite value");
    return f;
}

std::string region_to_json(const Region& r) {
    ordered_json j;
    spec_to_json(r.spec, j);
    std::vector<long> runs;
    std::uint8_t cur = 0;
    long len = 0;
    for (auto m : r.mask) {
        std::uint8_t b = m ? 1 : 0;
        if (b == cur) {
            ++len;
        } else {
            runs.push_back(len);
            cur = b;
            len = 1;
        }
    }
    runs.push_back(len);
    j["mask_rle"] = runs;
    j["open"] = r.open;
    j["south_cap"] = r.south_cap;
    j["north_cap"] = r.north_cap;
    j["at_infinity"] = r.at_infinity;
    return j.dump();
}

Region region_from_json(const std::string& text) {
    ordered_json j = parse_json(text);
    Region r;
    try {
        r.spec = spec_from_json(j);
        std::vector<long> runs = j.at("mask_rle").get<std::vector<long>>();
        r.mask.assign(r.spec.cells(), 0);
        std::size_t pos = 0;
        std::uint8_t cur = 0;
        for (long len : runs) {
            if (len < 0 || pos + static_cast<std::size_t>(len) > r.mask.size())
                throw domain_error("region JSON: run lengths exceed the grid");
            for (long k = 0; k < len; ++k) r.mask[pos++] = cur;
            cur = cur ? 0 : 1;
        }
        if (pos != r.mask.size())
            throw domain_error("region JSON: run lengths do not cover the grid");
        r.open = j.at("open").get<bool>();
        r.south_cap = j.value("south_cap", false);
        r.north_cap = j.value("north_cap", false);
        r.at_infinity = j.value("at_infinity", false);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("region JSON: ") + e.what());
    }
    if (r.spec.space == Space::cylinder && (r.south_cap || r.north_cap))
        throw domain_error("region JSON: cap flags are sphere-only");
    return r;
}

std::string profile_to_csv(const std::vector<std::pair<double, double>>& rows) {
    std::string out = "p,value\n";
    for (const auto& [p, v] : rows) {
        out += format_double(p);
        out += ',';
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::string contours_to_csv(const std::vector<Contour>& cs) {
    std::string out = "contour,q,p\n";
    for (std::size_t k = 0; k < cs.size(); ++k) {
        for (const auto& [q, p] : cs[k].pts) {
            out += std::to_string(k);
            out += ',';
            out += format_double(q);
            out += ',';
            out += format_double(p);
            out += '\n';
        }
    }
    return out;
}

std::string load_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot write file: " + path);
    out << text;
    if (!out) throw domain_error("write failed: " + path);
}

} // namespace symh
