#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lpfda/locpoly.hpp"

namespace lpfda {

// Curve CSV layout: header "x,<x_1>,...,<x_N>", then one row per curve
// "curve_i,<y_i1>,...,<y_iN>".
FunctionalSample read_curves_csv(const std::string& path);
void write_curves_csv(const FunctionalSample& sample, const std::string& path);

// Estimate CSV: header "x,estimate" and one row per evaluation point.
void write_estimate_csv(const std::vector<std::pair<double, double>>& curve,
                        const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace lpfda
