#include "dioph/torus.hpp"

#include <cmath>

namespace dioph {

mpz_class to_mpz(u128 v) {
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
    return (hi << 64) + lo;
}

u128 from_mpz_mod(const mpz_class& v) {
    mpz_class r;
    mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), 128);
    mpz_class hi = r >> 64;
    mpz_class lo = r - (hi << 64);
    return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
           static_cast<u128>(mpz_get_ui(lo.get_mpz_t()));
}

double ulps_to_double(u128 v) {
    double hi = static_cast<double>(static_cast<std::uint64_t>(v >> 64));
    double lo = static_cast<double>(static_cast<std::uint64_t>(v));
    return std::ldexp(hi, -64) + std::ldexp(lo, -128);
}

namespace {

u128 ulps_rounded(const BigFloat& x, mpfr_rnd_t mode) {
    if (mpfr_sgn(x.get()) <= 0) return 0;
    if (mpfr_cmp_d(x.get(), 0.5) >= 0) return kHalfTorus;
    BigFloat scaled(x.precision());
    mpfr_mul_2ui(scaled.get(), x.get(), 128, MPFR_RNDN);  // exact
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), scaled.get(), mode);
    return from_mpz_mod(z);
}

}  // namespace

u128 ceil_ulps(const BigFloat& x) { return ulps_rounded(x, MPFR_RNDU); }
u128 floor_ulps(const BigFloat& x) { return ulps_rounded(x, MPFR_RNDD); }

TorusCoefficient to_torus(const CertifiedReal& x) {
    BigFloat scaled(x.center().precision());
    mpfr_mul_2ui(scaled.get(), x.center().get(), 128, MPFR_RNDN);  // exact
    mpz_class floor_value;
    mpfr_get_z(floor_value.get_mpz_t(), scaled.get(), MPFR_RNDD);
    TorusCoefficient out;
    out.value = from_mpz_mod(floor_value);
    bool truncated = mpfr_integer_p(scaled.get()) == 0;
    if (!x.is_exact()) {
        BigFloat r(CertifiedReal::kRadiusPrecision);
        mpfr_mul_2ui(r.get(), x.radius().get(), 128, MPFR_RNDU);
        mpz_class rz;
        mpfr_get_z(rz.get_mpz_t(), r.get(), MPFR_RNDU);
        if (mpz_sizeinbase(rz.get_mpz_t(), 2) > 120) {
            out.radius = static_cast<u128>(1) << 120;
        } else {
            out.radius = from_mpz_mod(rz);
        }
    }
    if (truncated) out.radius += 1;
    return out;
}

CertifiedReal UlpBall::to_certified(int prec) const {
    int p = std::max(prec, 136);
    BigFloat lo(p), hi(p);
    mpz_class l = to_mpz(this->lo()), h = to_mpz(this->hi());
    mpfr_set_z_2exp(lo.get(), l.get_mpz_t(), -128, MPFR_RNDD);
    mpfr_set_z_2exp(hi.get(), h.get_mpz_t(), -128, MPFR_RNDU);
    return CertifiedReal::from_interval(lo, hi, p);
}

double UlpBall::to_double() const { return ulps_to_double(center); }

FixedForms::FixedForms(int vars, int forms)
    : vars_(vars),
      forms_(forms),
      coef_(static_cast<std::size_t>(vars * forms)),
      shift_(static_cast<std::size_t>(forms)) {
    if (vars < 1 || forms < 1 || forms > kMaxForms)
        throw InvalidArgument("FixedForms: unsupported dimensions");
}

void FixedForms::set_coefficient(int form, int var, const TorusCoefficient& c) {
    coef_[static_cast<std::size_t>(form * vars_ + var)] = c;
}

void FixedForms::set_shift(int form, const TorusCoefficient& c) {
    shift_[static_cast<std::size_t>(form)] = c;
}

bool FixedForms::has_shift() const {
    for (const auto& s : shift_)
        if (s.value != 0 || s.radius != 0) return true;
    return false;
}

u128 FixedForms::error_bound(std::int64_t norm) const {
    u128 worst = 0;
    auto n = static_cast<std::uint64_t>(norm < 0 ? -norm : norm);
    for (int k = 0; k < forms_; ++k) {
        u128 e = shift(k).radius;
        for (int v = 0; v < vars_; ++v) e = saturating_add(e, saturating_mul(coefficient(k, v).radius, n));
        if (e > worst) worst = e;
    }
    return worst;
}

u128 FixedForms::raw(int form, std::span<const std::int64_t> v) const {
    u128 t = shift(form).value;
    for (int j = 0; j < vars_; ++j)
        t += static_cast<u128>(static_cast<__int128>(v[static_cast<std::size_t>(j)])) * coefficient(form, j).value;
    return t;
}

UlpBall FixedForms::evaluate(std::span<const std::int64_t> v) const {
    // |max_k t_k - max_k d_k| <= max_k e_k whenever |t_k - d_k| <= e_k.
    UlpBall out;
    for (int k = 0; k < forms_; ++k) {
        u128 d = torus_distance(raw(k, v));
        u128 e = shift(k).radius;
        for (int j = 0; j < vars_; ++j) {
            std::int64_t c = v[static_cast<std::size_t>(j)];
            e = saturating_add(e, saturating_mul(coefficient(k, j).radius,
                                                 static_cast<std::uint64_t>(c < 0 ? -c : c)));
        }
        out.center = std::max(out.center, d);
        out.err = std::max(out.err, e);
    }
    return out;
}

}  // namespace dioph
