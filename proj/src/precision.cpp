#include "dioph/precision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace dioph {

namespace {

constexpr mpfr_prec_t kRad = CertifiedReal::kRadiusPrecision;

// ulp of a nonzero finite x at its own precision: 2^(EXP(x) - PREC(x)).
void add_ulp(mpfr_ptr radius, mpfr_srcptr x) {
    if (mpfr_zero_p(x) || !mpfr_number_p(x)) return;
    BigFloat ulp(kRad);
    mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(x) - mpfr_get_prec(x), MPFR_RNDU);
    mpfr_add(radius, radius, ulp.get(), MPFR_RNDU);
}

void abs_up(BigFloat& out, mpfr_srcptr x) { mpfr_abs(out.get(), x, MPFR_RNDU); }

}  // namespace

void PrecisionContext::validate() const {
    if (mantissa_bits < 64) throw InvalidArgument("mantissa_bits must be >= 64");
    if (guard_bits <= 0) throw InvalidArgument("guard_bits must be positive");
    if (guard_bits >= mantissa_bits) throw InvalidArgument("guard_bits must be below mantissa_bits");
}

PrecisionContext PrecisionContext::for_bound(std::int64_t y_max) {
    double lg = y_max > 1 ? std::log2(static_cast<double>(y_max)) : 0.0;
    int bits = static_cast<int>(std::ceil(4.0 * lg)) + 64;
    return {std::max(bits, 64), 16};
}

// ---------------------------------------------------------------- BigFloat

BigFloat::BigFloat(mpfr_prec_t prec) {
    mpfr_init2(value_, prec);
    mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
    if (this != &other) mpfr_swap(value_, other.value_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

double BigFloat::log_abs() const {
    if (mpfr_zero_p(value_)) return -INFINITY;
    long e = 0;
    double mant = mpfr_get_d_2exp(&e, value_, MPFR_RNDN);
    return std::log(std::fabs(mant)) + static_cast<double>(e) * std::log(2.0);
}

std::string BigFloat::to_string(int significant_digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", significant_digits, value_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

// ----------------------------------------------------------- CertifiedReal

CertifiedReal::CertifiedReal(int prec) : center_(prec), radius_(kRad) {}

void CertifiedReal::charge_rounding(int ternary) {
    if (ternary != 0) add_ulp(radius_.get(), center_.get());
}

CertifiedReal CertifiedReal::from_int(std::int64_t v, int prec) {
    CertifiedReal r(prec);
    r.charge_rounding(mpfr_set_si(r.center_.get(), static_cast<long>(v), MPFR_RNDN));
    return r;
}

CertifiedReal CertifiedReal::from_mpz(const mpz_class& v, int prec) {
    CertifiedReal r(prec);
    r.charge_rounding(mpfr_set_z(r.center_.get(), v.get_mpz_t(), MPFR_RNDN));
    return r;
}

CertifiedReal CertifiedReal::from_mpq(const mpq_class& v, int prec) {
    CertifiedReal r(prec);
    r.charge_rounding(mpfr_set_q(r.center_.get(), v.get_mpq_t(), MPFR_RNDN));
    return r;
}

CertifiedReal CertifiedReal::from_double(double v, int prec) {
    CertifiedReal r(prec);
    r.charge_rounding(mpfr_set_d(r.center_.get(), v, MPFR_RNDN));
    return r;
}

CertifiedReal CertifiedReal::from_dyadic(const mpz_class& numerator, long shift, int prec) {
    CertifiedReal r(prec);
    int t = mpfr_set_z(r.center_.get(), numerator.get_mpz_t(), MPFR_RNDN);
    mpfr_div_2si(r.center_.get(), r.center_.get(), shift, MPFR_RNDN);
    r.charge_rounding(t);
    return r;
}

namespace {

// Parses [sign] digits [. digits] [(e|E) [sign] digits] into an exact rational.
bool parse_decimal(const std::string& text, mpq_class& out) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false, any = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any) return false;
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        std::size_t used = 0;
        try {
            exp10 = std::stol(text.substr(i), &used);
        } catch (...) {
            return false;
        }
        i += used;
    }
    if (i != text.size()) return false;
    mpz_class num(digits, 10);
    long shift = exp10 - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    out = shift >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
    out.canonicalize();
    if (neg) out = -out;
    return true;
}

}  // namespace

CertifiedReal CertifiedReal::from_string(const std::string& text, int prec) {
    mpq_class q;
    if (parse_decimal(text, q)) return from_mpq(q, prec);
    CertifiedReal r(prec);
    if (mpfr_set_str(r.center_.get(), text.c_str(), 0, MPFR_RNDN) != 0)
        throw InvalidArgument("not a real literal: " + text);
    add_ulp(r.radius_.get(), r.center_.get());
    return r;
}

CertifiedReal CertifiedReal::from_interval(const BigFloat& lo, const BigFloat& hi, int prec) {
    CertifiedReal r(prec);
    BigFloat sum(std::max<mpfr_prec_t>({lo.precision(), hi.precision(), prec}) + 2);
    mpfr_add(sum.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(sum.get(), sum.get(), 1, MPFR_RNDN);
    mpfr_set(r.center_.get(), sum.get(), MPFR_RNDN);
    BigFloat a(kRad), b(kRad);
    mpfr_sub(a.get(), r.center_.get(), lo.get(), MPFR_RNDU);
    mpfr_sub(b.get(), hi.get(), r.center_.get(), MPFR_RNDU);
    mpfr_max(r.radius_.get(), a.get(), b.get(), MPFR_RNDU);
    if (mpfr_sgn(r.radius_.get()) < 0) mpfr_set_zero(r.radius_.get(), 1);
    return r;
}

CertifiedReal CertifiedReal::from_ball(const BigFloat& center, const BigFloat& radius) {
    CertifiedReal r(static_cast<int>(center.precision()));
    mpfr_set(r.center_.get(), center.get(), MPFR_RNDN);
    mpfr_abs(r.radius_.get(), radius.get(), MPFR_RNDU);
    return r;
}

BigFloat CertifiedReal::lower() const {
    BigFloat out(center_.precision());
    mpfr_sub(out.get(), center_.get(), radius_.get(), MPFR_RNDD);
    return out;
}

BigFloat CertifiedReal::upper() const {
    BigFloat out(center_.precision());
    mpfr_add(out.get(), center_.get(), radius_.get(), MPFR_RNDU);
    return out;
}

bool CertifiedReal::contains_zero() const {
    return mpfr_cmpabs(center_.get(), radius_.get()) <= 0;
}

bool CertifiedReal::is_certainly_positive() const {
    return mpfr_sgn(lower().get()) > 0;
}

std::string CertifiedReal::to_string(int significant_digits) const {
    return center_.to_string(significant_digits) + " ± " + radius_.to_string(3);
}

CertifiedReal CertifiedReal::with_precision(int prec) const {
    CertifiedReal r(prec);
    mpfr_set(r.radius_.get(), radius_.get(), MPFR_RNDU);
    r.charge_rounding(mpfr_set(r.center_.get(), center_.get(), MPFR_RNDN));
    return r;
}

CertifiedReal CertifiedReal::operator-() const {
    CertifiedReal r(*this);
    mpfr_neg(r.center_.get(), r.center_.get(), MPFR_RNDN);
    return r;
}

CertifiedReal CertifiedReal::abs() const {
    if (!contains_zero()) {
        CertifiedReal r(*this);
        mpfr_abs(r.center_.get(), r.center_.get(), MPFR_RNDN);
        return r;
    }
    // [0, max(|lo|, |hi|)]
    BigFloat zero(kRad);
    BigFloat top(center_.precision());
    mpfr_abs(top.get(), center_.get(), MPFR_RNDU);
    mpfr_add(top.get(), top.get(), radius_.get(), MPFR_RNDU);
    return from_interval(zero, top, precision());
}

CertifiedReal CertifiedReal::sqrt() const {
    BigFloat lo = lower();
    if (mpfr_sgn(lo.get()) < 0) {
        if (mpfr_sgn(upper().get()) < 0) throw InvalidArgument("sqrt of a negative ball");
    }
    CertifiedReal r(precision());
    r.charge_rounding(mpfr_sqrt(r.center_.get(), center_.get(), MPFR_RNDN));
    if (is_exact()) return r;
    BigFloat bound(kRad);
    if (mpfr_sgn(lo.get()) > 0) {
        // |sqrt(x) - sqrt(c)| <= r / (sqrt(lo) + sqrt(c))
        BigFloat den(kRad), s(kRad);
        mpfr_sqrt(den.get(), lo.get(), MPFR_RNDD);
        mpfr_sqrt(s.get(), center_.get(), MPFR_RNDD);
        mpfr_add(den.get(), den.get(), s.get(), MPFR_RNDD);
        mpfr_div(bound.get(), radius_.get(), den.get(), MPFR_RNDU);
    } else {
        BigFloat up = upper();
        mpfr_sqrt(bound.get(), up.get(), MPFR_RNDU);
    }
    mpfr_add(r.radius_.get(), r.radius_.get(), bound.get(), MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::mul_int(std::int64_t k) const {
    CertifiedReal r(precision());
    int t = mpfr_mul_si(r.center_.get(), center_.get(), static_cast<long>(k), MPFR_RNDN);
    mpfr_mul_ui(r.radius_.get(), radius_.get(),
                static_cast<unsigned long>(k < 0 ? -k : k), MPFR_RNDU);
    r.charge_rounding(t);
    return r;
}

CertifiedReal CertifiedReal::mul_2exp(long e) const {
    CertifiedReal r(*this);
    mpfr_mul_2si(r.center_.get(), r.center_.get(), e, MPFR_RNDN);
    mpfr_mul_2si(r.radius_.get(), r.radius_.get(), e, MPFR_RNDU);
    return r;
}

CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b) {
    CertifiedReal r(std::max(a.precision(), b.precision()));
    int t = mpfr_add(r.center_.get(), a.center_.get(), b.center_.get(), MPFR_RNDN);
    mpfr_add(r.radius_.get(), a.radius_.get(), b.radius_.get(), MPFR_RNDU);
    r.charge_rounding(t);
    return r;
}

CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b) {
    CertifiedReal r(std::max(a.precision(), b.precision()));
    int t = mpfr_sub(r.center_.get(), a.center_.get(), b.center_.get(), MPFR_RNDN);
    mpfr_add(r.radius_.get(), a.radius_.get(), b.radius_.get(), MPFR_RNDU);
    r.charge_rounding(t);
    return r;
}

CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b) {
    CertifiedReal r(std::max(a.precision(), b.precision()));
    int t = mpfr_mul(r.center_.get(), a.center_.get(), b.center_.get(), MPFR_RNDN);
    BigFloat ma(kRad), mb(kRad), term(kRad);
    abs_up(ma, a.center_.get());
    abs_up(mb, b.center_.get());
    mpfr_mul(term.get(), ma.get(), b.radius_.get(), MPFR_RNDU);
    mpfr_add(r.radius_.get(), r.radius_.get(), term.get(), MPFR_RNDU);
    mpfr_mul(term.get(), mb.get(), a.radius_.get(), MPFR_RNDU);
    mpfr_add(r.radius_.get(), r.radius_.get(), term.get(), MPFR_RNDU);
    mpfr_mul(term.get(), a.radius_.get(), b.radius_.get(), MPFR_RNDU);
    mpfr_add(r.radius_.get(), r.radius_.get(), term.get(), MPFR_RNDU);
    r.charge_rounding(t);
    return r;
}

CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b) {
    if (b.contains_zero()) throw ZeroNotExcluded("division by a ball containing zero");
    CertifiedReal r(std::max(a.precision(), b.precision()));
    int t = mpfr_div(r.center_.get(), a.center_.get(), b.center_.get(), MPFR_RNDN);
    if (!a.is_exact() || !b.is_exact()) {
        // |a/b - ca/cb| <= (|ca| rb + |cb| ra) / (|cb| (|cb| - rb))
        BigFloat ma(kRad), mb(kRad), num(kRad), term(kRad), den(kRad), gap(kRad);
        abs_up(ma, a.center_.get());
        abs_up(mb, b.center_.get());
        mpfr_mul(num.get(), ma.get(), b.radius_.get(), MPFR_RNDU);
        mpfr_mul(term.get(), mb.get(), a.radius_.get(), MPFR_RNDU);
        mpfr_add(num.get(), num.get(), term.get(), MPFR_RNDU);
        mpfr_abs(den.get(), b.center_.get(), MPFR_RNDD);
        mpfr_sub(gap.get(), den.get(), b.radius_.get(), MPFR_RNDD);
        mpfr_mul(den.get(), den.get(), gap.get(), MPFR_RNDD);
        mpfr_div(term.get(), num.get(), den.get(), MPFR_RNDU);
        mpfr_add(r.radius_.get(), r.radius_.get(), term.get(), MPFR_RNDU);
    }
    r.charge_rounding(t);
    return r;
}

CertifiedReal pow_positive(const CertifiedReal& x, double p) {
    BigFloat lo = x.lower();
    BigFloat hi = x.upper();
    if (mpfr_sgn(lo.get()) <= 0) throw ZeroNotExcluded("pow_positive needs a positive base");
    int prec = x.precision();
    BigFloat e(64);
    mpfr_set_d(e.get(), p, MPFR_RNDN);
    BigFloat a(prec), b(prec);
    // x^p is increasing in x for p >= 0 and decreasing for p < 0.
    const BigFloat& small = p >= 0 ? lo : hi;
    const BigFloat& large = p >= 0 ? hi : lo;
    mpfr_pow(a.get(), small.get(), e.get(), MPFR_RNDD);
    mpfr_pow(b.get(), large.get(), e.get(), MPFR_RNDU);
    return CertifiedReal::from_interval(a, b, prec);
}

CertifiedReal ball_max(const CertifiedReal& a, const CertifiedReal& b) {
    int prec = std::max(a.precision(), b.precision());
    BigFloat lo(prec), hi(prec);
    BigFloat la = a.lower(), lb = b.lower(), ua = a.upper(), ub = b.upper();
    mpfr_max(lo.get(), la.get(), lb.get(), MPFR_RNDD);
    mpfr_max(hi.get(), ua.get(), ub.get(), MPFR_RNDU);
    if (a.is_exact() && b.is_exact()) {
        return mpfr_cmp(a.center().get(), b.center().get()) >= 0 ? a : b;
    }
    return CertifiedReal::from_interval(lo, hi, prec);
}

CertifiedReal frac_dist(const CertifiedReal& t) {
    BigFloat quarter(kRad);
    mpfr_set_d(quarter.get(), 0.25, MPFR_RNDN);
    if (mpfr_cmp(t.radius().get(), quarter.get()) >= 0)
        throw InvalidArgument("frac_dist needs radius < 1/4");

    int prec = t.precision();
    BigFloat nearest(std::max<mpfr_prec_t>(prec, 64));
    mpfr_round(nearest.get(), t.center().get());

    if (!t.is_exact()) {
        BigFloat lo = t.lower(), hi = t.upper();
        BigFloat half(nearest.precision() + 2);
        for (int side : {-1, 1}) {
            mpfr_set(half.get(), nearest.get(), MPFR_RNDN);
            mpfr_add_d(half.get(), half.get(), 0.5 * side, MPFR_RNDN);
            if (mpfr_less_p(lo.get(), half.get()) && mpfr_less_p(half.get(), hi.get()))
                throw AmbiguousRounding("ball straddles a half-integer: " + t.to_string());
        }
    }

    CertifiedReal d = (t - CertifiedReal::from_ball(nearest, BigFloat(kRad))).abs();

    // The exact value lies in [0, 1/2]; tighten the enclosure accordingly.
    BigFloat lo = d.lower(), hi = d.upper();
    bool clipped = false;
    if (mpfr_sgn(lo.get()) < 0) {
        mpfr_set_zero(lo.get(), 1);
        clipped = true;
    }
    if (mpfr_cmp_d(hi.get(), 0.5) > 0) {
        mpfr_set_d(hi.get(), 0.5, MPFR_RNDN);
        clipped = true;
    }
    return clipped ? CertifiedReal::from_interval(lo, hi, prec) : d;
}

CertifiedReal vec_frac_dist(std::span<const CertifiedReal> v) {
    if (v.empty()) return CertifiedReal(64);
    CertifiedReal best = frac_dist(v[0]);
    for (std::size_t i = 1; i < v.size(); ++i) best = ball_max(best, frac_dist(v[i]));
    return best;
}

bool certified_less_than(const CertifiedReal& a, const CertifiedReal& b) {
    BigFloat au = a.upper(), bl = b.lower();
    if (mpfr_less_p(au.get(), bl.get())) return true;
    BigFloat al = a.lower(), bu = b.upper();
    if (mpfr_greaterequal_p(al.get(), bu.get())) return false;
    throw Indeterminate("overlapping balls: " + a.to_string() + " vs " + b.to_string());
}

}  // namespace dioph
