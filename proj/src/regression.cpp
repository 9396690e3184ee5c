#include "lpfda/regression.hpp"

#include <cmath>

#include "lpfda/errors.hpp"

namespace lpfda {

double RegressionFunction::deriv(int k, double x) const {
    if (k < 0 || k > 4) throw Error("RegressionFunction: derivative order out of range");
    return d[static_cast<std::size_t>(k)](x);
}

namespace {

RegressionFunction make_m1() {
    RegressionFunction m;
    m.id = "m1";
    m.d[0] = [](double x) { double u = x - 0.5; return 16.0 * u * u * u * u; };
    m.d[1] = [](double x) { double u = x - 0.5; return 64.0 * u * u * u; };
    m.d[2] = [](double x) { double u = x - 0.5; return 192.0 * u * u; };
    m.d[3] = [](double x) { return 384.0 * (x - 0.5); };
    m.d[4] = [](double) { return 384.0; };
    return m;
}

RegressionFunction make_m2() {
    constexpr double w = 6.0 * M_PI;
    auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-10.0 * (x - 0.5))); };
    RegressionFunction m;
    m.id = "m2";
    m.d[0] = [logistic](double x) { return logistic(x) + 0.03 * std::sin(w * x); };
    m.d[1] = [logistic](double x) {
        double L = logistic(x);
        return 10.0 * L * (1.0 - L) + 0.03 * w * std::cos(w * x);
    };
    m.d[2] = [logistic](double x) {
        double L = logistic(x);
        return 100.0 * L * (1.0 - L) * (1.0 - 2.0 * L) - 0.03 * w * w * std::sin(w * x);
    };
    m.d[3] = [logistic](double x) {
        double L = logistic(x);
        double g = L * (1.0 - L);
        double q = 1.0 - 2.0 * L;
        return 1000.0 * g * (q * q - 2.0 * g) - 0.03 * w * w * w * std::cos(w * x);
    };
    m.d[4] = [logistic](double x) {
        double L = logistic(x);
        double g = L * (1.0 - L);
        double q = 1.0 - 2.0 * L;
        return 10000.0 * g * q * (q * q - 8.0 * g) + 0.03 * w * w * w * w * std::sin(w * x);
    };
    return m;
}

}  // namespace

RegressionFunction regression_catalog(const std::string& id) {
    if (id == "m1") return make_m1();
    if (id == "m2") return make_m2();
    throw UnknownId("unknown regression id: " + id);
}

}  // namespace lpfda
