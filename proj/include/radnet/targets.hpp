#pragma once

// Named univariate/radial targets with analytic derivatives and exact
// Hoelder data, shared by the CLI and the test suites.

#include "radnet/radial.hpp"
#include "radnet/real.hpp"
#include "radnet/univariate.hpp"

#include <cmath>
#include <string>

namespace radnet {

// g*(t) on [0, 1]; r controls how much smoothness is declared.
inline UnivariateTarget named_univariate_target(const std::string& kind, double r, double value = 0.0) {
    int s = static_cast<int>(std::ceil(r)) - 1;
    double v = r - s;
    if (kind == "identity") {
        // g(t) = t; any declared smoothness is valid with c0 = 1 (s = 0) or
        // derivative constants 0 beyond order 1.
        return UnivariateTarget{[](const Real& t, int k) {
                                    if (k == 0) return t;
                                    return Real(k == 1 ? 1.0 : 0.0, t.precision_bits());
                                },
                                s, v, s == 0 ? 1.0 : 1e-9, 0.0, 1.0, 1.0};
    }
    if (kind == "constant") {
        return UnivariateTarget{[value](const Real& t, int k) {
                                    return Real(k == 0 ? value : 0.0, t.precision_bits());
                                },
                                s, v, 1e-12, 0.0, 1.0, std::abs(value)};
    }
    if (kind == "square") {
        // g(t) = t^2: g' = 2t (Lip 2), g'' = 2
        return UnivariateTarget{[](const Real& t, int k) {
                                    if (k == 0) return t * t;
                                    if (k == 1) return t * 2.0;
                                    return Real(k == 2 ? 2.0 : 0.0, t.precision_bits());
                                },
                                s, v, 2.0, 0.0, 1.0, 1.0};
    }
    if (kind == "sin2pi") {
        // g(t) = sin(2 pi t) / (2 pi); |g^(k)| <= (2 pi)^{k-1}
        return UnivariateTarget{[](const Real& t, int k) {
                                    const unsigned p = t.precision_bits();
                                    Real tau = 2.0 * pi(p) * t;
                                    Real scale = pow(2.0 * pi(p), static_cast<long>(k - 1));
                                    switch (k % 4) {
                                        case 0: return sin(tau) * scale;
                                        case 1: return cos(tau) * scale;
                                        case 2: return -sin(tau) * scale;
                                        default: return -cos(tau) * scale;
                                    }
                                },
                                s, v, std::pow(2.0 * 3.141592653589793, s), 0.0, 1.0,
                                1.0 / (2.0 * 3.141592653589793)};
    }
    throw argument_error("unknown target kind '" + kind + "'");
}

inline RadialTarget named_radial_target(const std::string& kind, double r, int d,
                                        double value = 0.0) {
    return RadialTarget{named_univariate_target(kind, r, value), d};
}

}  // namespace radnet
