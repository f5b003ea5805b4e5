#pragma once

// Fixed-point evaluation of linear forms modulo 1.
//
// A real coefficient a is stored as floor(a * 2^128) mod 2^128 together with an
// error radius in units of 2^-128 ("ulps"). Integer combinations are then
// computed exactly with wrapping 128-bit arithmetic, so the only error in
// || sum v_i a_i + s || is sum |v_i| rad_i + rad_s ulps.

#include <cstdint>
#include <span>
#include <vector>

#include "dioph/precision.hpp"

namespace dioph {

using u128 = unsigned __int128;

inline constexpr int kTorusBits = 128;
inline constexpr u128 kHalfTorus = static_cast<u128>(1) << 127;

struct TorusCoefficient {
    u128 value = 0;
    u128 radius = 0;
};

/// Fixed-point image of a real mod 1.
TorusCoefficient to_torus(const CertifiedReal& x);

inline u128 torus_distance(u128 t) {
    u128 neg = static_cast<u128>(0) - t;
    return t < neg ? t : neg;
}

inline u128 saturating_add(u128 a, u128 b) {
    u128 s = a + b;
    return s < a ? ~static_cast<u128>(0) : s;
}

inline u128 saturating_mul(u128 a, std::uint64_t k) {
    if (k == 0 || a == 0) return 0;
    u128 limit = ~static_cast<u128>(0) / k;
    return a > limit ? ~static_cast<u128>(0) : a * k;
}

/// An enclosure center ± err of a distance to Z^k, in ulps.
struct UlpBall {
    u128 center = 0;
    u128 err = 0;

    u128 lo() const { return center > err ? center - err : 0; }
    u128 hi() const {
        u128 h = saturating_add(center, err);
        return h > kHalfTorus ? kHalfTorus : h;
    }
    bool exact() const { return err == 0; }

    CertifiedReal to_certified(int prec) const;
    double to_double() const;
};

mpz_class to_mpz(u128 v);
u128 from_mpz_mod(const mpz_class& v);
double ulps_to_double(u128 v);

/// Smallest ulp count >= x * 2^128 (x >= 0), saturating at 2^127.
u128 ceil_ulps(const BigFloat& x);
/// Largest ulp count <= x * 2^128 (x >= 0), saturating at 2^127.
u128 floor_ulps(const BigFloat& x);

/// `forms` affine forms in `vars` integer variables, each reduced mod 1.
/// Coefficient (k, v) multiplies variable v in form k.
class FixedForms {
public:
    static constexpr int kMaxForms = 4;

    FixedForms(int vars, int forms);

    int vars() const { return vars_; }
    int forms() const { return forms_; }

    void set_coefficient(int form, int var, const TorusCoefficient& c);
    void set_shift(int form, const TorusCoefficient& c);

    const TorusCoefficient& coefficient(int form, int var) const {
        return coef_[static_cast<std::size_t>(form * vars_ + var)];
    }
    const TorusCoefficient& shift(int form) const { return shift_[static_cast<std::size_t>(form)]; }
    bool has_shift() const;

    /// Error bound (ulps) valid for every v with |v| <= norm.
    u128 error_bound(std::int64_t norm) const;

    /// max_k || form_k(v) ||, enclosed.
    UlpBall evaluate(std::span<const std::int64_t> v) const;

    /// Raw fixed-point value of form k at v (no distance taken).
    u128 raw(int form, std::span<const std::int64_t> v) const;

private:
    int vars_;
    int forms_;
    std::vector<TorusCoefficient> coef_;
    std::vector<TorusCoefficient> shift_;
};

}  // namespace dioph
