#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "dioph/errors.hpp"

namespace dioph {

/// Working precision shared by every real-valued computation of a run.
///
/// `mantissa_bits` is the MPFR precision of ball centers. A derived quantity
/// is considered acceptable when its radius is at most
/// 2^-(mantissa_bits - guard_bits) relative to its magnitude bound.
struct PrecisionContext {
    int mantissa_bits = 128;
    int guard_bits = 16;

    void validate() const;

    /// Exponent e such that the radius target is 2^e.
    int radius_exponent() const { return -(mantissa_bits - guard_bits); }

    PrecisionContext doubled() const { return {mantissa_bits * 2, guard_bits}; }

    /// 4 log2(y_max) + 64 bits, never below 64.
    static PrecisionContext for_bound(std::int64_t y_max);

    friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;
};

/// Owning RAII handle for an mpfr_t.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec = 64);
    BigFloat(const BigFloat& other);
    BigFloat(BigFloat&& other) noexcept;
    BigFloat& operator=(const BigFloat& other);
    BigFloat& operator=(BigFloat&& other) noexcept;
    ~BigFloat();

    mpfr_ptr get() { return value_; }
    mpfr_srcptr get() const { return value_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
    /// Natural log of |x| as a double; valid far outside double's exponent range.
    double log_abs() const;
    std::string to_string(int significant_digits = 15) const;

private:
    mpfr_t value_;
};

/// Ball arithmetic: the represented real lies in [center - radius, center + radius].
///
/// Centers are rounded to nearest at the working precision; every rounding is
/// charged to the radius, which is kept at 64 bits and rounded upward. A ball
/// has radius zero exactly when its value is exactly representable.
class CertifiedReal {
public:
    static constexpr mpfr_prec_t kRadiusPrecision = 64;

    explicit CertifiedReal(int prec = 128);

    static CertifiedReal from_int(std::int64_t v, int prec);
    static CertifiedReal from_mpz(const mpz_class& v, int prec);
    static CertifiedReal from_mpq(const mpq_class& v, int prec);
    /// Doubles are dyadic rationals; the conversion is exact when prec >= 53.
    static CertifiedReal from_double(double v, int prec);
    /// numerator * 2^-shift.
    static CertifiedReal from_dyadic(const mpz_class& numerator, long shift, int prec);
    /// Decimal or hexadecimal literal in MPFR syntax.
    static CertifiedReal from_string(const std::string& text, int prec);
    /// Smallest ball at `prec` containing [lo, hi].
    static CertifiedReal from_interval(const BigFloat& lo, const BigFloat& hi, int prec);
    static CertifiedReal from_ball(const BigFloat& center, const BigFloat& radius);

    const BigFloat& center() const { return center_; }
    const BigFloat& radius() const { return radius_; }
    int precision() const { return static_cast<int>(center_.precision()); }

    BigFloat lower() const;
    BigFloat upper() const;
    bool is_exact() const { return mpfr_zero_p(radius_.get()) != 0; }
    bool contains_zero() const;
    bool is_certainly_positive() const;

    double to_double() const { return center_.to_double(); }
    double radius_double() const { return mpfr_get_d(radius_.get(), MPFR_RNDU); }
    /// "center ± radius", both to the given number of significant digits.
    std::string to_string(int significant_digits = 15) const;

    /// Re-round to a different precision, keeping the enclosure.
    CertifiedReal with_precision(int prec) const;

    CertifiedReal operator-() const;
    CertifiedReal abs() const;
    CertifiedReal sqrt() const;
    CertifiedReal mul_int(std::int64_t k) const;
    CertifiedReal mul_2exp(long e) const;

    friend CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b);

private:
    void charge_rounding(int ternary);

    BigFloat center_;
    BigFloat radius_;
};

/// x^p for x > 0 and a real exponent p, enclosed by directed rounding.
CertifiedReal pow_positive(const CertifiedReal& x, double p);

/// Enclosure of max(a, b).
CertifiedReal ball_max(const CertifiedReal& a, const CertifiedReal& b);

/// Distance to the nearest integer. Requires t.radius < 1/4; throws
/// AmbiguousRounding when the ball straddles a half-integer.
CertifiedReal frac_dist(const CertifiedReal& t);

/// Sup-norm distance of a vector to Z^k.
CertifiedReal vec_frac_dist(std::span<const CertifiedReal> v);

/// True only if a < b for every pair of points in the two balls, false only if
/// a >= b for every pair; throws Indeterminate otherwise.
bool certified_less_than(const CertifiedReal& a, const CertifiedReal& b);

/// Runs `fn(ctx)` and retries with doubled mantissa on precision failures,
/// at most `max_retries` times. A persistent failure to exclude zero becomes
/// DegenerateForm; any other persistent failure becomes PrecisionExhausted.
template <class Fn>
auto with_precision_retry(PrecisionContext ctx, Fn&& fn, int max_retries = 3) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fn(ctx);
        } catch (const PrecisionOverflow&) {
            throw;
        } catch (const PrecisionExhausted&) {
            throw;
        } catch (const ZeroNotExcluded& e) {
            if (attempt >= max_retries) throw DegenerateForm(e.what());
        } catch (const PrecisionError& e) {
            if (attempt >= max_retries)
                throw PrecisionExhausted(std::string("precision retries exhausted: ") + e.what());
        }
        ctx = ctx.doubled();
    }
}

}  // namespace dioph
