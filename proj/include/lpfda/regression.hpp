#pragma once

#include <array>
#include <functional>
#include <string>

namespace lpfda {

// Closed-form regression target with derivatives up to the fourth order.
struct RegressionFunction {
    std::string id;
    std::array<std::function<double(double)>, 5> d;  // value, m', m'', m''', m''''

    double operator()(double x) const { return d[0](x); }
    double deriv(int k, double x) const;
};

// "m1": 16 (x - 1/2)^4, a unit-range quartic with its minimum at 1/2.
// "m2": logistic ramp plus a small fast sine, 1/(1+e^{-10(x-1/2)}) + 0.03 sin(6 pi x).
RegressionFunction regression_catalog(const std::string& id);

}  // namespace lpfda
