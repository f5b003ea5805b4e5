#include "doctest.h"

#include <cmath>
#include <vector>

#include "dioph/best_approx.hpp"
#include "dioph/number_factory.hpp"
#include "dioph/rng.hpp"
#include "oracles.hpp"

using namespace dioph;

namespace {
const PrecisionContext CTX{128, 16};

std::vector<std::int64_t> pell_denominators(std::int64_t limit) {
    std::vector<std::int64_t> q{1, 2};
    while (2 * q.back() + q[q.size() - 2] <= limit) q.push_back(2 * q.back() + q[q.size() - 2]);
    return q;
}

BestApproxSeq synthetic(const std::vector<std::int64_t>& Y, const std::vector<double>& M) {
    BestApproxSeq s;
    s.n = s.m = 1;
    for (std::size_t i = 0; i < Y.size(); ++i)
        s.items.push_back({{Y[i]}, Y[i], CertifiedReal::from_double(M[i], 64), EngineKind::exhaustive});
    return s;
}
}  // namespace

TEST_CASE("sqrt 2 up to 30") {
    auto sys = scalar_system(sqrt_of(2, CTX));
    auto seq = build_sequence_exhaustive(sys, 30);
    CHECK(seq.norms() == std::vector<std::int64_t>{1, 2, 5, 12, 29});
    const long double r2 = std::sqrt(2.0L);
    for (const auto& it : seq.items) CHECK(std::fabs(it.M.to_double() - (double)oracle::dist(it.Y * r2)) < 1e-15);
    CHECK(std::fabs(seq.items[0].M.to_double() - 0.41421) < 1e-5);
    CHECK(std::fabs(seq.items[4].M.to_double() - 0.01219) < 1e-5);
}

TEST_CASE("golden ratio up to 13") {
    auto seq = build_sequence_exhaustive(scalar_system(golden_ratio(CTX)), 13);
    CHECK(seq.norms() == std::vector<std::int64_t>{1, 2, 3, 5, 8, 13});
}

TEST_CASE("one half plus 2^-80") {
    mpz_class num = (mpz_class(1) << 79) + 1;
    auto xi = CertifiedReal::from_dyadic(num, 80, 128);
    auto seq = build_sequence_exhaustive(scalar_system(xi), 3);
    REQUIRE(seq.size() == 2);
    CHECK(seq.items[0].Y == 1);
    CHECK(seq.items[1].Y == 2);
    CHECK(mpfr_cmp_d(seq.items[0].M.center().get(), 0.5) < 0);
    BigFloat expect(128);
    mpfr_set_ui_2exp(expect.get(), 1, -79, MPFR_RNDN);
    CHECK(mpfr_equal_p(seq.items[1].M.center().get(), expect.get()));
}

TEST_CASE("guided equals exhaustive below the exhaustive bound") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (auto [n, m] : {std::pair{1, 1}, {2, 1}, {1, 2}}) {
            auto sys = random_matrix(seed, n, m, CTX);
            std::int64_t y = n == 1 ? 5000 : 300;
            auto a = build_sequence_exhaustive(sys, y);
            auto b = build_sequence_guided(sys, y, 2.0, y);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.items[i].y == b.items[i].y);
        }
    }
}

TEST_CASE("guided engine past the exhaustive bound matches enumeration") {
    auto sys = random_matrix(11, 2, 1, CTX);
    auto a = build_sequence_exhaustive(sys, 400);
    auto b = build_sequence_guided(sys, 400, 2.0, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.items[i].y == b.items[i].y);
    CHECK(b.items.back().engine == EngineKind::reduction_guided);
}

TEST_CASE("sqrt 2 guided to 10^6 gives the Pell denominators") {
    auto seq = build_sequence_guided(scalar_system(sqrt_of(2, CTX)), 1'000'000, 2.0, 10);
    CHECK(seq.norms() == pell_denominators(1'000'000));
    CHECK(sequence_invariants_hold(seq));
    auto l1 = validate_lemma1(seq, 1, 1);
    CHECK(l1.applicable);
    CHECK(l1.pass);
    CHECK(validate_dirichlet(seq, 1, 1).pass);
}

TEST_CASE("column of golden powers is degenerate") {
    auto sys = power_matrix(golden_ratio(CTX), 2, Orientation::column);
    auto probe = degeneracy_probe(sys, 5, CTX);
    REQUIRE(probe.relation);
    CHECK(canonical(*probe.relation) == IntVector{1, -1});
}

TEST_CASE("dirichlet on a column of Fibonacci powers") {
    auto xi = cf_to_real(CFSpec::fibonacci(1, 2), CTX);
    auto sys = power_matrix(xi, 2, Orientation::column);
    auto seq = build_sequence_guided(sys, 100'000);
    auto d = validate_dirichlet(seq, 2, 1);
    CHECK(d.pass);
    CHECK(d.checked + 1 == seq.size());
    for (const auto& it : seq.items) CHECK(it.y == canonical(it.y));
}

TEST_CASE("growth step validator") {
    auto golden = build_sequence_exhaustive(scalar_system(golden_ratio(CTX)), 10000);
    auto g = validate_lemma1(golden, 1, 1);
    CHECK(g.applicable);
    CHECK(g.pass);
    auto short_seq = build_sequence_exhaustive(scalar_system(sqrt_of(2, CTX)), 1000);
    CHECK(short_seq.size() == 9);
    CHECK_FALSE(validate_lemma1(short_seq, 1, 1).applicable);
    // slow growth after the first step must trip the check
    auto flat = synthetic({1, 100, 101, 102, 103, 104, 105, 106, 107, 108, 109, 110}, std::vector<double>(12, 0.001));
    auto f = validate_lemma1(flat, 1, 1);
    CHECK_FALSE(f.pass);
    CHECK(f.first_violation == 1u);
}

TEST_CASE("dirichlet validator examples") {
    auto seq = build_sequence_exhaustive(scalar_system(sqrt_of(2, CTX)), 30);
    auto d = validate_dirichlet(seq, 1, 1);
    CHECK(d.pass);
    CHECK(d.checked == 4);
    auto bad = synthetic({1, 2, 5}, {0.6, 0.1, 0.05});
    auto b = validate_dirichlet(bad, 1, 1);
    CHECK_FALSE(b.pass);
    CHECK(b.violations == 1);
    CHECK(b.first_violation == 1u);
    // golden: margins against a direct long double evaluation on Fibonacci numbers
    auto golden = build_sequence_exhaustive(scalar_system(golden_ratio(CTX)), 10000);
    auto gd = validate_dirichlet(golden, 1, 1);
    CHECK(gd.pass);
    auto fib = oracle::fibonacci_numbers(30);
    const long double phi = (1 + std::sqrt(5.0L)) / 2;
    long double worst = 1;
    for (std::size_t k = 1; k + 1 < fib.size() && fib[k + 1] <= 10000; ++k)
        worst = std::min(worst, 1 - oracle::dist(fib[k] * phi) * fib[k + 1]);
    CHECK(std::fabs(gd.min_margin - (double)worst) < 1e-12);
}

TEST_CASE("random theta rarely misses y.theta >= Y^-delta") {
    auto seq = build_sequence_exhaustive(scalar_system(sqrt_of(2, CTX)), 10000);
    RealVector zero{CertifiedReal::from_int(0, 128)};
    CHECK(lemma2_last_violation(seq, zero, 0.5) == seq.size());
    auto rep = lemma2_statistical_check(seq, 0.5, 100, 42);
    CHECK(rep.count_beyond(10) <= 5);
    auto big = lemma2_statistical_check(seq, 10, 50, 43);
    CHECK(big.count_beyond(1) == 0);
    CHECK_THROWS_AS(lemma2_last_violation(seq, zero, 0), InvalidArgument);
}

TEST_CASE("budget overrun keeps the partial sequence") {
    auto sys = random_matrix(5, 2, 1, CTX);
    BuildOptions bo;
    bo.budget = 2000;
    try {
        build_sequence_exhaustive(sys, 1000, bo);
        FAIL("expected a budget overrun");
    } catch (const BudgetExceededWithSequence& e) {
        CHECK(e.partial().partial);
        CHECK(e.partial().size() > 0);
        CHECK(sequence_invariants_hold(e.partial()));
    }
}

TEST_CASE("table serialization") {
    auto seq = build_sequence_exhaustive(scalar_system(sqrt_of(2, CTX)), 12);
    auto t = seq.to_table();
    CHECK(t.rfind("i,Y,y1,M,M_radius,engine\n", 0) == 0);
    CHECK(t.find("\n4,12,12,0.0294372515228") != std::string::npos);
}
