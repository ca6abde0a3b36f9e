#pragma once

#include "symh/contour.hpp"
#include "symh/field.hpp"

#include <string>
#include <utility>
#include <vector>

namespace symh {

// fixed 12-significant-digit formatting used by every text output
std::string format_double(double v);
// round through the 12-digit representation so emitted JSON numbers match
double quantize12(double v);

// {"nq":..,"np":..,"p_min":..,"p_max":..,"space":"cylinder"|"sphere",
//  "values":[...]} with values in row-major order, index = i*np + j
std::string field_to_json(const CylinderField& f);
CylinderField field_from_json(const std::string& text);

// grid header plus run-length-encoded mask (runs alternate starting with
// zeros) and the openness, cap and at-infinity flags
std::string region_to_json(const Region& r);
Region region_from_json(const std::string& text);

std::string profile_to_csv(const std::vector<std::pair<double, double>>& rows);
std::string contours_to_csv(const std::vector<Contour>& cs);

std::string load_text_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

} // namespace symh
