#pragma once

// One-hidden-layer univariate nets: sum_j a_j phi(w_j t + theta_j).

#include "radnet/activation.hpp"
#include "radnet/real.hpp"

#include <vector>

namespace radnet {

struct ShallowTerm {
    Real a;
    Real w;
    Real theta;
};

struct ShallowNet1D {
    Activation act;
    std::vector<ShallowTerm> terms;

    Real eval(const Real& t) const {
        Real acc(t.precision_bits());
        for (const auto& term : terms) acc += term.a * act.value(term.w * t + term.theta);
        return acc;
    }

    Real max_abs_outer() const {
        Real m(terms.empty() ? kDefaultPrecision : terms.front().a.precision_bits());
        for (const auto& term : terms) m = max(m, abs(term.a));
        return m;
    }

    Real abs_outer_sum() const {
        Real s(terms.empty() ? kDefaultPrecision : terms.front().a.precision_bits());
        for (const auto& term : terms) s += abs(term.a);
        return s;
    }
};

}  // namespace radnet
