// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is 0 once every criterion has been evaluated, 1 if the run itself broke.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <mpfr.h>

#include "dioph/adversarial.hpp"
#include "dioph/best_approx.hpp"
#include "dioph/exponent_lab.hpp"
#include "dioph/number_factory.hpp"
#include "dioph/rng.hpp"
#include "dioph/transference.hpp"

using namespace dioph;

namespace {

const PrecisionContext CTX{128, 16};
const double GOLD = (1 + std::sqrt(5.0)) / 2;

struct Line {
    int id;
    bool pass;
    std::string text;
};
std::vector<Line> lines;
std::vector<std::pair<std::string, BestApproxSeq>> all_sequences;

double now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string num(double v, int digits = 4) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*f", digits, v);
    return b;
}

void report(int id, bool pass, const std::string& text, double t0) {
    std::string t = text + " [" + num(now() - t0, 1) + " s]";
    std::fprintf(stderr, "criterion %d done: %s\n", id, pass ? "PASS" : "FAIL");
    lines.push_back({id, pass, t});
}

BestApproxSeq keep(const std::string& label, BestApproxSeq s) {
    all_sequences.emplace_back(label, s);
    return s;
}

struct HomPair {
    double w = 0, w_hat = 0;
};

HomPair hom(const BestApproxSeq& s) {
    auto [w, wh] = hom_exponents(s);
    return {w.value(), wh.value()};
}

CertifiedReal fibonacci_xi() { return cf_to_real(CFSpec::fibonacci(1, 2), CTX); }

// criterion 1
HomPair golden;

void golden_baseline() {
    double t0 = now();
    auto seq = keep("golden 1x1", build_sequence_guided(scalar_system(golden_ratio(CTX)), 1'000'000));
    golden = hom(seq);
    bool ok = golden.w >= 0.9 && golden.w <= 1.1 && golden.w_hat >= 0.9 && golden.w_hat <= 1.1;
    report(1, ok,
           "golden ratio to 1e6, " + std::to_string(seq.size()) + " records: w = " + num(golden.w) +
               ", w_hat = " + num(golden.w_hat) + " (want both in [0.90, 1.10])",
           t0);
}

// criterion 2
HomPair fib_row, fib_col;  // row: forms (y xi, y xi^2); column: y1 xi + y2 xi^2

void fibonacci_exponents() {
    double t0 = now();
    auto xi = fibonacci_xi();
    auto row = power_matrix(xi, 2, Orientation::row);
    auto col = power_matrix(xi, 2, Orientation::column);
    auto at_1e6 = build_sequence_guided(row, 1'000'000, 2.0, 10'000);
    // too few simultaneous records below 1e6 for an estimate, so the row side goes on to 1e9
    auto row_seq = keep("fibonacci row", build_sequence_guided(row, 1'000'000'000, 2.0, 10'000));
    auto col_seq = keep("fibonacci column", build_sequence_guided(col, 1'000'000, 2.0, 10'000));
    fib_row = hom(row_seq);
    fib_col = hom(col_seq);
    const double a = (std::sqrt(5.0) - 1) / 2, b = (3 + std::sqrt(5.0)) / 2;
    bool ok = std::abs(fib_row.w_hat - a) <= 0.08 && std::abs(fib_col.w_hat - b) <= 0.15;
    report(2, ok,
           "simultaneous w_hat = " + num(fib_row.w_hat) + " (want " + num(a) + " +- 0.08; " +
               std::to_string(at_1e6.size()) + " records to 1e6, " + std::to_string(row_seq.size()) +
               " to 1e9), linear form w_hat = " + num(fib_col.w_hat) + " (want " + num(b) + " +- 0.15, " +
               std::to_string(col_seq.size()) + " records to 1e6)",
           t0);
}

// criteria 3 and 4
struct GenericRun {
    std::string label;
    GenericReport rep;
};
std::vector<GenericRun> generic_runs;

GenericReport generic(const std::string& label, const LinearSystem& sys, std::int64_t y_max, std::uint64_t seed) {
    GenericOptions o;
    o.exhaustive_up_to = 10'000;
    auto r = generic_theorem_experiment(sys, 24, 100'000, y_max, seed, o);
    generic_runs.push_back({label, r});
    return r;
}

void generic_equality() {
    double t0 = now();
    auto xi = fibonacci_xi();
    auto row = generic("fibonacci row", power_matrix(xi, 2, Orientation::row), 1'000'000'000, 31);
    auto col = generic("fibonacci column", power_matrix(xi, 2, Orientation::column), 1'000'000, 32);
    const double a = GOLD, b = (3 - std::sqrt(5.0)) / 2;
    std::size_t used_row = row.samples.size() - row.insufficient_samples;
    std::size_t used_col = col.samples.size() - col.insufficient_samples;
    bool ok = used_row >= 20 && used_col >= 20 && std::abs(row.median_w - a) <= 0.10 &&
              std::abs(col.median_w - b) <= 0.08;
    auto slopes = [](const GenericReport& r) {
        std::vector<double> v;
        for (const auto& s : r.samples)
            if (!s.insufficient) v.push_back(s.w.regression_slope);
        return v.empty() ? NAN : median(v);
    };
    report(3, ok,
           "row median w(A,theta) = " + num(row.median_w) + " over " + std::to_string(used_row) + " theta (want " +
               num(a) + " +- 0.10), column median = " + num(col.median_w) + " over " + std::to_string(used_col) +
               " theta (want " + num(b) + " +- 0.08); median slopes " + num(slopes(row)) + ", " + num(slopes(col)),
           t0);
}

void lower_bounds() {
    double t0 = now();
    generic("golden 1x1", scalar_system(golden_ratio(CTX)), 1'000'000, 33);
    generic("sqrt 2 1x1", scalar_system(sqrt_of(2, CTX)), 1'000'000, 34);
    std::size_t samples = 0, bad = 0;
    double worst = INFINITY;
    std::string where;
    for (const auto& g : generic_runs) {
        for (const auto& s : g.rep.samples) {
            if (s.insufficient) continue;
            ++samples;
            double m1 = s.w.value() - g.rep.predicted_w, m2 = s.w_hat.value() - g.rep.predicted_w_hat;
            double m = std::min(m1, m2);
            if (m < -0.1) ++bad;
            if (m < worst) {
                worst = m;
                where = g.label;
            }
        }
    }
    report(4, samples > 0 && bad == 0,
           std::to_string(bad) + " of " + std::to_string(samples) + " theta below 1/w_hat(tA) or 1/w(tA) by more "
               "than 0.1; tightest margin " + num(worst) + " (" + where + ")",
           t0);
}

// criterion 5
void sequence_suites() {
    double t0 = now();
    // a few more systems so that every shape is covered
    keep("sqrt 2 exhaustive", build_sequence_exhaustive(scalar_system(sqrt_of(2, CTX)), 1'000'000));
    keep("random 2x1", build_sequence_guided(random_matrix(5, 2, 1, CTX), 1'000'000, 2.0, 1'000));
    keep("random 1x2", build_sequence_guided(random_matrix(6, 1, 2, CTX), 1'000'000'000, 2.0, 10'000));
    keep("random 2x2", build_sequence_guided(random_matrix(7, 2, 2, CTX), 3'000, 2.0, 100));
    std::size_t dv = 0, lv = 0, dc = 0, lc = 0;
    std::string first;
    for (const auto& [label, s] : all_sequences) {
        auto d = validate_dirichlet(s, s.n, s.m);
        auto l = validate_lemma1(s, s.n, s.m);
        dv += d.violations;
        lv += l.violations;
        dc += d.checked;
        lc += l.checked;
        if ((d.violations || l.violations) && first.empty()) first = label;
    }
    report(5, dv == 0 && lv == 0,
           std::to_string(all_sequences.size()) + " sequences: Dirichlet " + std::to_string(dv) + " violations in " +
               std::to_string(dc) + " checks, geometric growth " + std::to_string(lv) + " violations in " +
               std::to_string(lc) + " checks" + (first.empty() ? "" : ", first in " + first),
           t0);
}

// criterion 6
void lemma3_suite() {
    double t0 = now();
    bool kappas = kappa(1, 1) == 2 && kappa(1, 2) == 9 && kappa(2, 1) == 9;
    const std::pair<int, int> shapes[] = {{1, 1}, {1, 2}, {2, 1}};
    std::size_t ok = 0, tried = 0;
    std::string fail;
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto [n, m] = shapes[i % 3];
        auto sys = random_matrix(1000 + i, n, m, CTX);
        std::int64_t Y = n * m == 1 ? 10 : 20;  // kappa / Y < 1/2
        double X = kappa(m, n).get_d() / min_M_up_to(sys, Y).to_double() * (1 + 1e-9);
        ++tried;
        if (!check_hypothesis(sys, X, static_cast<double>(Y)).holds) {
            fail = "hypothesis failed on instance " + std::to_string(i);
            continue;
        }
        RealVector theta;
        for (int k = 0; k < n; ++k) theta.push_back(uniform_dyadic(77, i * 4 + static_cast<std::uint64_t>(k), 64, 128));
        try {
            auto cert = lemma3_solve(sys, theta, X, static_cast<double>(Y));
            if (verify_certificate(cert, sys, theta))
                ++ok;
            else if (fail.empty())
                fail = "certificate rejected on instance " + std::to_string(i);
        } catch (const Error& e) {
            if (fail.empty()) fail = "instance " + std::to_string(i) + ": " + e.what();
        }
    }
    report(6, kappas && ok == 100,
           std::to_string(ok) + " of " + std::to_string(tried) + " certified; kappa(1,1), kappa(1,2), kappa(2,1) = " +
               kappa(1, 1).get_str() + ", " + kappa(1, 2).get_str() + ", " + kappa(2, 1).get_str() +
               (fail.empty() ? "" : "; " + fail),
           t0);
}

// criterion 7
void adversarial() {
    double t0 = now();
    auto sys = scalar_system(golden_ratio(CTX));
    auto seq = keep("golden 1x1 to 1e8", build_sequence_guided(sys, 100'000'000));
    auto phi = extract_phi(seq, 1);
    auto check = verify_phi(phi.Y, phi.phi, 1);
    auto target = build_theta(phi);
    bool rechecked = recheck_target(target, 256);
    auto p1 = verify_prop1_bound(sys, target, 10'000);
    bool const_ok = std::abs(p1.constant - 1.0 / 576) < 1e-15;
    bool ok = phi.size() >= 10 && check.pass() && target.certified_indices() == phi.size() && rechecked &&
              p1.holds() && const_ok;
    report(7, ok,
           std::to_string(phi.size()) + " indices (growth " + (check.growth ? "ok" : "fails") + ", gap " +
               (check.gap ? "ok" : "fails") + "), " + std::to_string(target.certified_indices()) +
               " certified at distance >= 1/4, recheck at 256 bits " + (rechecked ? "ok" : "fails") +
               "; explicit bound C = 1/" + num(1 / p1.constant, 0) + " to |x| <= 1e4: " + p1.verdict() +
               ", min slack " + num(p1.min_slack, 2),
           t0);
}

// criterion 8
void khintchine() {
    double t0 = now();
    struct Case {
        std::string label;
        KhintchineAudit a;
    };
    std::vector<Case> cases;
    cases.push_back({"golden", khintchine_audit(1, 1, golden.w, golden.w, golden.w_hat, golden.w_hat, 0.1)});
    // A = (xi, xi^2) as a row: its own forms are the linear form, tA the simultaneous one
    cases.push_back({"fibonacci row A",
                     khintchine_audit(1, 2, fib_col.w, fib_row.w, fib_col.w_hat, fib_row.w_hat, 0.1)});
    cases.push_back({"fibonacci column A",
                     khintchine_audit(2, 1, fib_row.w, fib_col.w, fib_row.w_hat, fib_col.w_hat, 0.1)});
    // the homogeneous halves of the generic runs
    const GenericReport* gr = nullptr;
    const GenericReport* gc = nullptr;
    for (const auto& g : generic_runs) {
        if (g.label == "fibonacci row") gr = &g.rep;
        if (g.label == "fibonacci column") gc = &g.rep;
    }
    if (gr && gc) {
        double rw = gr->hom_w.value(), rh = gr->hom_w_hat.value(), cw = gc->hom_w.value(), ch = gc->hom_w_hat.value();
        cases.push_back({"generic runs, row A", khintchine_audit(1, 2, cw, rw, ch, rh, 0.1)});
        cases.push_back({"generic runs, column A", khintchine_audit(2, 1, rw, cw, rh, ch, 0.1)});
    }
    bool ok = true;
    std::string text;
    for (const auto& c : cases) {
        ok = ok && c.a.pass();
        text += (text.empty() ? "" : "; ") + c.label + ": w margin " + num(c.a.w_margin) + ", w_hat margin " +
                num(c.a.hat_margin);
    }
    report(8, ok, text, t0);
}

// criterion 9
std::vector<std::int64_t> cf_denominators(mpq_class x, std::int64_t limit) {
    // frac(x) = [0; a1, a2, ...], q_k = a_k q_{k-1} + q_{k-2}
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    x -= f;
    std::vector<std::int64_t> out{1};
    mpz_class q0 = 0, q1 = 1;
    while (x != 0) {
        mpq_class inv = 1 / x;
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
        x = inv - a;
        mpz_class q2 = a * q1 + q0;
        if (q2 > limit) break;
        if (q2 != q1) out.push_back(q2.get_si());
        q0 = q1;
        q1 = q2;
    }
    return out;
}

std::vector<std::int64_t> sqrt_denominators(std::int64_t d, std::int64_t limit) {
    // periodic expansion of sqrt(d) by the integer recurrence
    auto a0 = static_cast<std::int64_t>(std::sqrt(static_cast<double>(d)));
    while ((a0 + 1) * (a0 + 1) <= d) ++a0;
    while (a0 * a0 > d) --a0;
    std::int64_t mm = 0, dd = 1, a = a0, q0 = 0, q1 = 1;
    std::vector<std::int64_t> out{1};
    for (;;) {
        mm = dd * a - mm;
        dd = (d - mm * mm) / dd;
        a = (a0 + mm) / dd;
        std::int64_t q2 = a * q1 + q0;
        if (q2 > limit) break;
        if (q2 != q1) out.push_back(q2);
        q0 = q1;
        q1 = q2;
    }
    return out;
}

std::vector<std::int64_t> engine_denominators(const LinearSystem& sys, std::int64_t limit) {
    auto s = keep(sys.provenance().to_text(), build_sequence_exhaustive(sys, limit));
    std::vector<std::int64_t> out;
    for (const auto& it : s.items) out.push_back(std::abs(it.y[0]));
    return out;
}

void cf_oracle() {
    double t0 = now();
    const std::int64_t limit = 10'000;
    std::size_t inputs = 0, matched = 0;
    std::string bad;
    auto compare = [&](const std::string& label, const std::vector<std::int64_t>& got,
                       const std::vector<std::int64_t>& want) {
        ++inputs;
        if (got == want)
            ++matched;
        else if (bad.empty())
            bad = label;
    };
    for (std::int64_t d : {2, 3, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 17, 19}) {
        compare("sqrt " + std::to_string(d), engine_denominators(scalar_system(sqrt_of(d, CTX)), limit),
                sqrt_denominators(d, limit));
    }
    {
        std::vector<std::int64_t> fib{1};
        for (std::int64_t a = 1, b = 2; b <= limit; a = b - a) {
            fib.push_back(b);
            b += a;
        }
        compare("golden", engine_denominators(scalar_system(golden_ratio(CTX)), limit), fib);
    }
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto sys = random_matrix(seed, 1, 1, CTX);
        mpq_class x;
        mpfr_get_q(x.get_mpq_t(), sys.entry(0, 0).center().get());
        compare("random seed " + std::to_string(seed), engine_denominators(sys, limit), cf_denominators(x, limit));
    }
    report(9, inputs >= 20 && matched == inputs,
           std::to_string(matched) + " of " + std::to_string(inputs) +
               " inputs match the continued fraction denominators to 1e4" + (bad.empty() ? "" : ", first mismatch " + bad),
           t0);
}

}  // namespace

int main() {
    double t0 = now();
    try {
        golden_baseline();
        fibonacci_exponents();
        generic_equality();
        lower_bounds();
        cf_oracle();
        lemma3_suite();
        adversarial();
        khintchine();
        sequence_suites();  // last: it audits every sequence built above
    } catch (const std::exception& e) {
        std::printf("acceptance run aborted: %s\n", e.what());
        return 1;
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    std::size_t passed = 0;
    for (const auto& l : lines) {
        std::printf("criterion %d: %s  %s\n", l.id, l.pass ? "PASS" : "FAIL", l.text.c_str());
        passed += l.pass;
    }
    std::printf("summary: %zu of %zu criteria pass (%.1f s)\n", passed, lines.size(), now() - t0);
    return 0;
}
