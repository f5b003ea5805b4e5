#include "doctest.h"

#include <cmath>
#include <vector>

#include "dioph/linear_system.hpp"
#include "dioph/number_factory.hpp"
#include "dioph/rng.hpp"
#include "oracles.hpp"

using namespace dioph;

namespace {
const int P = 128;
const PrecisionContext CTX{P, 16};
CertifiedReal R(const char* s) { return CertifiedReal::from_string(s, P); }
LinearSystem root2() { return scalar_system(sqrt_of(2, CTX)); }
bool same(const CertifiedReal& a, const CertifiedReal& b) {
    return mpfr_equal_p(a.center().get(), b.center().get()) && mpfr_equal_p(a.radius().get(), b.radius().get());
}
}  // namespace

TEST_CASE("construction checks") {
    CHECK_THROWS_AS(LinearSystem(2, 2, RealVector{R("1")}, {}), InvalidArgument);
    RealVector mixed{CertifiedReal::from_int(2, 128).sqrt(), CertifiedReal::from_int(3, 256).sqrt()};
    CHECK_THROWS_AS(LinearSystem(1, 2, mixed, {}), InvalidArgument);
}

TEST_CASE("eval_M spec examples") {
    IntVector y{5};
    auto v = eval_M(root2(), y);
    CHECK(std::fabs(v.to_double() - static_cast<double>(oracle::dist(5 * std::sqrt(2.0L)))) < 1e-15);
    CHECK(v.to_double() == doctest::Approx(0.0710678).epsilon(1e-6));
    IntVector zero{0};
    CHECK(eval_M(root2(), zero).to_double() == 0.0);

    auto xi = golden_ratio(CTX);
    auto row = power_matrix(xi, 2, Orientation::row);
    IntVector one{1};
    double expect = std::max(frac_dist(xi).to_double(), frac_dist(xi * xi).to_double());
    CHECK(eval_M(row, one).to_double() == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("eval_M on a rational entry") {
    auto half = scalar_system(R("0.5"));
    IntVector y{2};
    CHECK_THROWS_AS(eval_M(half, y), DegenerateForm);
}

TEST_CASE("eval_L_inhom spec examples") {
    IntVector x0{0};
    auto th0 = zero_theta(1, P);
    CHECK(eval_L_inhom(root2(), x0, th0).to_double() == 0.0);
    RealVector th{R("0.3")};
    CHECK(eval_L_inhom(root2(), x0, th).to_double() == doctest::Approx(0.3).epsilon(1e-15));
    RealVector th5{R("0.05")};
    IntVector x5{5};
    double oracle_v = static_cast<double>(oracle::dist(5 * std::sqrt(2.0L) + 0.05L));
    CHECK(std::fabs(eval_L_inhom(root2(), x5, th5).to_double() - oracle_v) < 1e-15);
    CHECK(oracle_v == doctest::Approx(0.1210678).epsilon(1e-6));
}

TEST_CASE("duality_check spec examples") {
    IntVector x0{0}, y0{0};
    RealVector th{R("0.3")};
    auto w0 = duality_check(root2(), x0, y0, th);
    CHECK(w0.lhs.to_double() == 0.0);
    CHECK(w0.rhs.to_double() == 0.0);
    CHECK(w0.holds());

    IntVector x{5}, y{3};
    RealVector th5{R("0.05")};
    auto w = duality_check(root2(), x, y, th5);
    long double s2 = std::sqrt(2.0L);
    double lhs = static_cast<double>(oracle::dist(3 * 0.05L));
    double rhs = static_cast<double>(3 * oracle::dist(5 * s2 + 0.05L) + 5 * oracle::dist(3 * s2));
    CHECK(w.lhs.to_double() == doctest::Approx(lhs).epsilon(1e-12));
    CHECK(w.rhs.to_double() == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(w.holds());
}

TEST_CASE("duality inequality holds on 1000 random samples") {
    int failures = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        int n = 1 + static_cast<int>(counter_word(1, s, 0) % 3);
        int m = 1 + static_cast<int>(counter_word(1, s, 1) % 3);
        auto sys = random_matrix(1000 + s, n, m, CTX);
        IntVector x(static_cast<std::size_t>(m)), y(static_cast<std::size_t>(n));
        for (int j = 0; j < m; ++j) x[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(counter_word(2, s, j) % 201) - 100;
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(counter_word(3, s, i) % 201) - 100;
        RealVector th;
        for (int i = 0; i < n; ++i) th.push_back(uniform_dyadic(4, s * 8 + static_cast<std::uint64_t>(i), 64, P));
        if (!duality_check(sys, x, y, th).holds()) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("degeneracy_probe spec examples") {
    auto half = scalar_system(R("0.5"));
    auto r1 = degeneracy_probe(half, 2, CTX);
    REQUIRE(r1.relation.has_value());
    CHECK(*r1.relation == IntVector{2});

    auto r2 = degeneracy_probe(root2(), 100, CTX);
    CHECK_FALSE(r2.relation.has_value());

    auto xi = sqrt_of(2, CTX);
    auto col = LinearSystem(2, 1, RealVector{xi, xi.mul_int(2) + CertifiedReal::from_int(3, P)}, {});
    auto r3 = degeneracy_probe(col, 10, CTX);
    REQUIRE(r3.relation.has_value());
    CHECK(*r3.relation == IntVector{2, -1});
}

TEST_CASE("transpose is an involution and swaps forms") {
    auto sys = random_matrix(77, 2, 3, CTX);
    auto tt = sys.transpose().transpose();
    REQUIRE(tt.n() == 2);
    REQUIRE(tt.m() == 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(same(sys.entry(i, j), tt.entry(i, j)));
    auto t = sys.transpose();
    auto th = zero_theta(3, P);
    for (std::int64_t a = -4; a <= 4; ++a)
        for (std::int64_t b = -4; b <= 4; ++b) {
            IntVector y{a, b};
            auto lhs = eval_M(sys, y);
            auto rhs = eval_L_inhom(t, y, th);
            CHECK(lhs.to_double() == doctest::Approx(rhs.to_double()).epsilon(1e-30));
        }
}

TEST_CASE("text record carries provenance") {
    auto sys = random_matrix(5, 1, 2, CTX);
    auto text = sys.to_text();
    CHECK(text.find("seed=5") != std::string::npos);
    CHECK(canonical(IntVector{0, -3, 2}) == IntVector{0, 3, -2});
}
