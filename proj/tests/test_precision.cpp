#include "doctest.h"

#include <cmath>
#include <vector>

#include "dioph/precision.hpp"
#include "dioph/rng.hpp"
#include "dioph/torus.hpp"
#include "oracles.hpp"

using namespace dioph;

namespace {
const int P = 128;
CertifiedReal R(const char* s) { return CertifiedReal::from_string(s, P); }
BigFloat bf(double v, int prec) {
    BigFloat b(prec);
    mpfr_set_d(b.get(), v, MPFR_RNDN);
    return b;
}
}  // namespace

TEST_CASE("context validation and default from bound") {
    CHECK_THROWS_AS(PrecisionContext({32, 8}).validate(), InvalidArgument);
    CHECK_NOTHROW(PrecisionContext{}.validate());
    // 4 log2(10^6) + 64 = 143.7 -> 144
    CHECK(PrecisionContext::for_bound(1000000).mantissa_bits == 144);
    CHECK(PrecisionContext::for_bound(1).mantissa_bits == 64);
}

TEST_CASE("exactness of constructors") {
    CHECK(CertifiedReal::from_int(7, P).is_exact());
    CHECK(R("0.5").is_exact());
    CHECK_FALSE(R("0.1").is_exact());
    CHECK(R("0.1").radius_double() < std::ldexp(1.0, -P + 1));
    CHECK(CertifiedReal::from_dyadic(3, 4, P).to_double() == 3.0 / 16);
}

TEST_CASE("frac_dist spec examples") {
    CHECK(frac_dist(R("0.3")).to_double() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(frac_dist(R("-0.7")).to_double() == doctest::Approx(0.3).epsilon(1e-15));
    // golden ratio: 1 - 1/phi; oracle: ratio of consecutive Fibonacci numbers
    auto f = oracle::fibonacci_numbers(60);
    long double oracle_value = 2.0L - f[59] / f[58];
    CertifiedReal phi = (CertifiedReal::from_int(1, P) + CertifiedReal::from_int(5, P).sqrt()).mul_2exp(-1);
    auto d = frac_dist(phi);
    CHECK(std::fabs(d.to_double() - static_cast<double>(oracle_value)) < 1e-15);
    CHECK(std::fabs(d.to_double() - 0.3819660113) < 1e-10);
    CHECK(d.radius_double() < 1e-30);
}

TEST_CASE("frac_dist preconditions") {
    CHECK_THROWS_AS(frac_dist(CertifiedReal::from_interval(bf(0.0, P), bf(0.6, P), P)),
                    InvalidArgument);
    CHECK_THROWS_AS(frac_dist(CertifiedReal::from_interval(bf(0.45, P), bf(0.55, P), P)),
                    AmbiguousRounding);
}

TEST_CASE("vec_frac_dist spec examples") {
    std::vector<CertifiedReal> a{R("0.1"), R("0.4")};
    CHECK(vec_frac_dist(a).to_double() == doctest::Approx(0.4).epsilon(1e-15));
    std::vector<CertifiedReal> b{R("1.0"), R("2.0")};
    CHECK(vec_frac_dist(b).to_double() == 0.0);
    CHECK(vec_frac_dist(b).is_exact());
    auto s2 = CertifiedReal::from_int(2, P).sqrt();
    std::vector<CertifiedReal> c{s2, s2.mul_int(2)};
    // 2 sqrt2 = 2.828427..., distance 0.171573; sqrt2 distance 0.414214
    long double sq = std::sqrt(2.0L);
    CHECK(std::fabs(vec_frac_dist(c).to_double() - static_cast<double>(oracle::dist(sq))) < 1e-15);
}

TEST_CASE("certified_less_than spec examples") {
    CHECK(certified_less_than(R("0.5"), R("0.6")));
    CHECK_FALSE(certified_less_than(R("0.6"), R("0.5")));
    auto ball = [](const char* c, const char* r) {
        return CertifiedReal::from_ball(bf(std::stod(c), P), bf(std::stod(r), 64));
    };
    CHECK_THROWS_AS(certified_less_than(ball("0.5", "0.2"), ball("0.6", "0.2")), Indeterminate);
    CHECK_THROWS_AS(certified_less_than(ball("0.3819660", "1e-6"), ball("0.3819661", "1e-9")), Indeterminate);
}

TEST_CASE("frac_dist is 1-periodic, even and bounded on dyadic inputs") {
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto t = uniform_dyadic(11, s, 100, P);
        auto k = static_cast<std::int64_t>(counter_word(12, s, 0) % 2001) - 1000;
        auto t_shift = t + CertifiedReal::from_int(k, P);
        auto shifted = t_shift.mul_2exp(0);
        auto d0 = frac_dist(t);
        auto d1 = frac_dist(shifted);
        auto d2 = frac_dist(-shifted);
        CHECK(mpfr_equal_p(d0.center().get(), d1.center().get()));
        CHECK(mpfr_equal_p(d0.center().get(), d2.center().get()));
        CHECK(d0.is_exact());
        CHECK(d0.to_double() >= 0.0);
        CHECK(d0.to_double() <= 0.5);
    }
}

TEST_CASE("raising precision never flips a decision") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto a = uniform_dyadic(5, 2 * s, 200, 200);
        auto b = uniform_dyadic(5, 2 * s + 1, 200, 200);
        bool decided = false, answer = false;
        for (int prec : {64, 128, 256, 512}) {
            auto x = a.with_precision(prec).sqrt();
            auto y = b.with_precision(prec).sqrt();
            try {
                bool r = certified_less_than(x, y);
                if (decided) CHECK(r == answer);
                decided = true;
                answer = r;
            } catch (const Indeterminate&) {
                CHECK_FALSE(decided);
            }
        }
        CHECK(decided);
    }
}

TEST_CASE("precision retry doubles and maps errors") {
    std::vector<int> seen;
    auto r = with_precision_retry(PrecisionContext{64, 16}, [&](const PrecisionContext& c) {
        seen.push_back(c.mantissa_bits);
        if (c.mantissa_bits < 256) throw Indeterminate("x");
        return c.mantissa_bits;
    });
    CHECK(r == 256);
    CHECK(seen == std::vector<int>{64, 128, 256});
    CHECK_THROWS_AS(with_precision_retry(PrecisionContext{64, 16},
                                         [](const PrecisionContext&) -> int { throw Indeterminate("x"); }),
                    PrecisionExhausted);
    CHECK_THROWS_AS(with_precision_retry(PrecisionContext{64, 16},
                                         [](const PrecisionContext&) -> int { throw ZeroNotExcluded("x"); }),
                    DegenerateForm);
}

TEST_CASE("torus images agree with MPFR") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto x = uniform_dyadic(3, s, 150, 150).mul_int(37) - CertifiedReal::from_int(11, 150);
        auto tc = to_torus(x);
        // floor(frac(x) * 2^128)
        BigFloat f(400);
        mpfr_frac(f.get(), x.center().get(), MPFR_RNDN);
        if (mpfr_sgn(f.get()) < 0) mpfr_add_ui(f.get(), f.get(), 1, MPFR_RNDN);
        mpfr_mul_2ui(f.get(), f.get(), 128, MPFR_RNDN);
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), f.get(), MPFR_RNDD);
        CHECK(to_mpz(tc.value) == z);
        CHECK(tc.radius <= 2);
    }
}

TEST_CASE("fixed forms evaluation encloses the certified value") {
    int prec = 200;
    auto a = CertifiedReal::from_int(2, prec).sqrt();
    auto b = CertifiedReal::from_int(3, prec).sqrt();
    FixedForms forms(2, 1);
    forms.set_coefficient(0, 0, to_torus(a));
    forms.set_coefficient(0, 1, to_torus(b));
    for (std::int64_t y0 = -30; y0 <= 30; ++y0)
        for (std::int64_t y1 = -30; y1 <= 30; ++y1) {
            std::vector<std::int64_t> y{y0, y1};
            auto ball = forms.evaluate(y);
            auto exact = frac_dist(a.mul_int(y0) + b.mul_int(y1));
            auto enclosed = ball.to_certified(prec);
            CHECK(mpfr_lessequal_p(exact.lower().get(), enclosed.upper().get()));
            CHECK(mpfr_greaterequal_p(exact.upper().get(), enclosed.lower().get()));
            CHECK(ball.err <= forms.error_bound(30));
            CHECK(std::fabs(ball.to_double() - exact.to_double()) < 1e-15);
        }
}
