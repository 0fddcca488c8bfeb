#pragma once

// Configurable-precision real scalar on top of MPFR.
//
// Every Real carries its mantissa width in bits.  Arithmetic between two
// Reals requires equal precision; mixing precisions throws.  Plain int and
// double operands embed exactly (a double is exact in any mantissa of >= 53
// bits, which is the minimum we allow).

#include <stdint.h>
#define MPFR_USE_INTMAX_T
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace radnet {

struct precision_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct argument_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct unsupported_order_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct search_failure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct training_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr unsigned kMinPrecision = 53;
inline constexpr unsigned kDefaultPrecision = 256;

class Real {
  public:
    Real() : Real(kDefaultPrecision) {}

    explicit Real(unsigned precision_bits) : prec_(check_prec(precision_bits)) {
        mpfr_init2(v_, prec_);
        mpfr_set_zero(v_, 1);
    }

    Real(double d, unsigned precision_bits) : prec_(check_prec(precision_bits)) {
        mpfr_init2(v_, prec_);
        mpfr_set_d(v_, d, MPFR_RNDN);
    }

    Real(long i, unsigned precision_bits) : prec_(check_prec(precision_bits)) {
        mpfr_init2(v_, prec_);
        mpfr_set_si(v_, i, MPFR_RNDN);
    }

    Real(const Real& o) : prec_(o.prec_) {
        mpfr_init2(v_, prec_);
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    Real(Real&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(v_, prec_);
        mpfr_swap(v_, o.v_);
    }

    Real& operator=(const Real& o) {
        if (this != &o) {
            if (prec_ != o.prec_) {
                mpfr_set_prec(v_, o.prec_);
                prec_ = o.prec_;
            }
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    Real& operator=(Real&& o) noexcept {
        if (this != &o) {
            mpfr_swap(v_, o.v_);
            std::swap(prec_, o.prec_);
        }
        return *this;
    }

    ~Real() { mpfr_clear(v_); }

    static Real from_string(const std::string& s, unsigned precision_bits) {
        Real r(precision_bits);
        if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw parse_error("not a decimal number: '" + s + "'");
        return r;
    }

    unsigned precision_bits() const { return prec_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    // Decimal string that reparses bit-exactly at the same precision.
    std::string to_string() const {
        if (mpfr_nan_p(v_)) return "nan";
        if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
        if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";
        mpfr_exp_t e;
        char* raw = mpfr_get_str(nullptr, &e, 10, 0, v_, MPFR_RNDN);
        std::string digits(raw);
        mpfr_free_str(raw);
        std::string sign;
        if (digits[0] == '-') {
            sign = "-";
            digits.erase(0, 1);
        }
        // digits represent 0.<digits> * 10^e
        return sign + "0." + digits + "e" + std::to_string(static_cast<long>(e));
    }

    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    // -- arithmetic ---------------------------------------------------------

    friend Real operator+(const Real& a, const Real& b) {
        Real r(same_prec(a, b));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(same_prec(a, b));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(same_prec(a, b));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r(same_prec(a, b));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    Real operator-() const {
        Real r(prec_);
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend Real operator+(const Real& a, double b) { return a + Real(b, a.prec_); }
    friend Real operator+(double a, const Real& b) { return Real(a, b.prec_) + b; }
    friend Real operator-(const Real& a, double b) { return a - Real(b, a.prec_); }
    friend Real operator-(double a, const Real& b) { return Real(a, b.prec_) - b; }
    friend Real operator*(const Real& a, double b) { return a * Real(b, a.prec_); }
    friend Real operator*(double a, const Real& b) { return Real(a, b.prec_) * b; }
    friend Real operator/(const Real& a, double b) { return a / Real(b, a.prec_); }
    friend Real operator/(double a, const Real& b) { return Real(a, b.prec_) / b; }

    Real& operator+=(const Real& o) { return *this = *this + o; }
    Real& operator-=(const Real& o) { return *this = *this - o; }
    Real& operator*=(const Real& o) { return *this = *this * o; }
    Real& operator/=(const Real& o) { return *this = *this / o; }
    Real& operator+=(double o) { return *this = *this + o; }
    Real& operator-=(double o) { return *this = *this - o; }
    Real& operator*=(double o) { return *this = *this * o; }
    Real& operator/=(double o) { return *this = *this / o; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

    friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

  private:
    static unsigned check_prec(unsigned p) {
        if (p < kMinPrecision)
            throw argument_error("precision_bits must be >= " + std::to_string(kMinPrecision));
        return p;
    }
    static unsigned same_prec(const Real& a, const Real& b) {
        if (a.prec_ != b.prec_)
            throw precision_mismatch_error("mixing precision contexts: " + std::to_string(a.prec_) +
                                           " vs " + std::to_string(b.prec_) + " bits");
        return a.prec_;
    }

    mpfr_t v_;
    unsigned prec_;
};

// -- elementary functions (result at operand precision) ----------------------

#define RADNET_UNARY_FN(name, mpfr_name)        \
    inline Real name(const Real& x) {           \
        Real r(x.precision_bits());             \
        mpfr_name(r.raw(), x.raw(), MPFR_RNDN); \
        return r;                               \
    }

RADNET_UNARY_FN(exp, mpfr_exp)
RADNET_UNARY_FN(log, mpfr_log)
RADNET_UNARY_FN(log2, mpfr_log2)
RADNET_UNARY_FN(sin, mpfr_sin)
RADNET_UNARY_FN(cos, mpfr_cos)
RADNET_UNARY_FN(atan, mpfr_atan)
RADNET_UNARY_FN(tanh, mpfr_tanh)
RADNET_UNARY_FN(sqrt, mpfr_sqrt)
RADNET_UNARY_FN(abs, mpfr_abs)
RADNET_UNARY_FN(gamma, mpfr_gamma)

#undef RADNET_UNARY_FN

inline Real floor(const Real& x) {
    Real r(x.precision_bits());
    mpfr_rint(r.raw(), x.raw(), MPFR_RNDD);
    return r;
}

inline Real pow(const Real& x, const Real& y) {
    Real r(x.precision_bits());
    if (x.precision_bits() != y.precision_bits())
        throw precision_mismatch_error("pow: mixed precision");
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

inline Real pow(const Real& x, long n) {
    Real r(x.precision_bits());
    mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
    return r;
}

inline Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
inline Real max(const Real& a, const Real& b) { return a >= b ? a : b; }

inline Real pi(unsigned prec) {
    Real r(prec);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

// Distance in units of b's last place; used by exactness tests.
inline double ulp_distance(const Real& a, const Real& b) {
    if (a == b) return 0.0;
    Real d = abs(a - b);
    mpfr_exp_t eb = b.is_zero() ? mpfr_get_exp(d.raw()) : mpfr_get_exp(b.raw());
    long ulp_exp = static_cast<long>(eb) - static_cast<long>(b.precision_bits());
    Real ulp(b.precision_bits());
    mpfr_set_ui_2exp(ulp.raw(), 1, ulp_exp, MPFR_RNDN);
    return (d / ulp).to_double();
}

// 64-bit structural hash of the exact value (used for subtree deduplication).
inline std::uint64_t value_hash(const Real& x) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t w) {
        h ^= w;
        h *= 1099511628211ull;
    };
    if (!x.is_finite()) {
        mix(x.is_nan() ? 0x7ff8dead : 0x7ff0beef);
        return h;
    }
    if (x.is_zero()) {
        mix(0x5a5a5a5a);
        return h;
    }
    mix(static_cast<std::uint64_t>(x.sign() + 2));
    mix(static_cast<std::uint64_t>(mpfr_get_exp(x.raw())));
    const mpfr_srcptr p = x.raw();
    const mp_limb_t* limbs = p->_mpfr_d;
    const long nlimbs = (mpfr_get_prec(p) + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
    for (long i = 0; i < nlimbs; ++i) mix(static_cast<std::uint64_t>(limbs[i]));
    return h;
}

}  // namespace radnet
