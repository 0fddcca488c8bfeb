#pragma once

// Dense univariate polynomials with Real coefficients, ascending degree.

#include "radnet/real.hpp"

#include <vector>

namespace radnet {

class Poly {
  public:
    explicit Poly(unsigned prec) : prec_(prec) {}
    Poly(std::vector<Real> coeffs, unsigned prec) : c_(std::move(coeffs)), prec_(prec) {
        for (const Real& u : c_)
            if (u.precision_bits() != prec_) throw precision_mismatch_error("Poly: mixed precision coefficients");
        strip_exact_zeros();
    }

    static Poly constant(const Real& c) { return Poly({c}, c.precision_bits()); }

    static Poly monomial(int degree, const Real& coeff) {
        std::vector<Real> c(degree + 1, Real(coeff.precision_bits()));
        c[degree] = coeff;
        return Poly(std::move(c), coeff.precision_bits());
    }

    unsigned precision_bits() const { return prec_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero poly

    const Real& coeff(int i) const { return c_[i]; }
    const std::vector<Real>& coeffs() const { return c_; }

    Real leading() const {
        if (is_zero()) throw argument_error("zero polynomial has no leading coefficient");
        return c_.back();
    }

    Real eval(const Real& t) const {
        Real acc(prec_);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
        return acc;
    }

    Real abs_coeff_sum() const {
        Real s(prec_);
        for (const Real& u : c_) s += abs(u);
        return s;
    }

    Poly operator-(const Poly& o) const {
        check(o);
        std::vector<Real> r(std::max(c_.size(), o.c_.size()), Real(prec_));
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return Poly(std::move(r), prec_);
    }

    Poly operator+(const Poly& o) const {
        check(o);
        std::vector<Real> r(std::max(c_.size(), o.c_.size()), Real(prec_));
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r), prec_);
    }

    Poly scaled(const Real& s) const {
        std::vector<Real> r = c_;
        for (Real& u : r) u *= s;
        return Poly(std::move(r), prec_);
    }

    // p(t + delta) expanded around the new origin.
    Poly recentered(const Real& delta) const {
        std::vector<Real> r(c_.size(), Real(prec_));
        for (size_t i = c_.size(); i-- > 0;) {
            // multiply accumulator by (t + delta), then add c_i
            for (size_t j = r.size(); j-- > 1;) r[j] = r[j] * delta + r[j - 1];
            // degree-0 slot
            r[0] = r[0] * delta + c_[i];
            // note: loop above implements acc = acc*(t+delta) + c_i via synthetic shift
        }
        return Poly(std::move(r), prec_);
    }

    // Drop a near-zero leading block: |u| < threshold counts as zero.
    Poly stripped(const Real& threshold) const {
        std::vector<Real> r = c_;
        while (!r.empty() && abs(r.back()) < threshold) r.pop_back();
        return Poly(std::move(r), prec_);
    }

  private:
    void check(const Poly& o) const {
        if (o.prec_ != prec_) throw precision_mismatch_error("Poly: mixed precision operands");
    }
    void strip_exact_zeros() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<Real> c_;
    unsigned prec_;
};

}  // namespace radnet
