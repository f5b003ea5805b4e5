#include "dioph/best_approx.hpp"

#include <cmath>
#include <sstream>

#include "dioph/records.hpp"
#include "dioph/rng.hpp"

namespace dioph {

std::string engine_name(EngineKind e) { return e == EngineKind::exhaustive ? "exhaustive" : "reduction_guided"; }

std::vector<std::int64_t> BestApproxSeq::norms() const {
    std::vector<std::int64_t> out;
    out.reserve(items.size());
    for (const auto& it : items) out.push_back(it.Y);
    return out;
}

std::string BestApproxSeq::to_table() const {
    std::ostringstream out;
    out << "i,Y";
    for (int k = 0; k < n; ++k) out << ",y" << (k + 1);
    out << ",M,M_radius,engine\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        out << (i + 1) << ',' << it.Y;
        for (auto c : it.y) out << ',' << c;
        out << ',' << it.M.center().to_string(15) << ',' << it.M.radius().to_string(3) << ','
            << engine_name(it.engine) << '\n';
    }
    return out.str();
}

namespace {

BestApproxSeq run_scan(const LinearSystem& sys, std::int64_t y_max, const ScanOptions& opt, EngineKind engine) {
    if (y_max < 1) throw InvalidArgument("best approximations: Y_max must be >= 1");
    FixedForms forms = sys.column_forms();
    ExactEval exact = [&sys](std::span<const std::int64_t> y) { return eval_M(sys, y); };
    ScanResult r = scan_records(forms, exact, opt);
    BestApproxSeq seq;
    seq.n = sys.n();
    seq.m = sys.m();
    seq.engine = engine;
    seq.exhaustive_up_to = std::min(opt.exhaustive_up_to, y_max);
    seq.y_max = y_max;
    seq.evaluations = r.evaluations;
    seq.completed_norm = r.completed_norm;
    seq.partial = r.budget_hit;
    for (auto& rec : r.records) {
        ApproxItem it;
        it.y = std::move(rec.v);
        it.Y = rec.norm;
        it.M = std::move(rec.value);
        it.engine = rec.guided ? EngineKind::reduction_guided : EngineKind::exhaustive;
        seq.items.push_back(std::move(it));
    }
    if (r.budget_hit) throw BudgetExceededWithSequence(r.budget_message, std::move(seq));
    return seq;
}

}  // namespace

BestApproxSeq build_sequence_exhaustive(const LinearSystem& sys, std::int64_t y_max, const BuildOptions& options) {
    if (sys.n() > 3) throw InvalidArgument("build_sequence_exhaustive: n > 3 is outside the enumeration envelope");
    ScanOptions opt;
    opt.half = true;
    opt.limit = y_max;
    opt.exhaustive_up_to = y_max;
    opt.budget = options.budget;
    return run_scan(sys, y_max, opt, EngineKind::exhaustive);
}

std::int64_t default_exhaustive_bound(int n) {
    switch (n) {
        case 1: return 10000;
        case 2: return 10000;
        case 3: return 200;
        default: return 30;
    }
}

BestApproxSeq build_sequence_guided(const LinearSystem& sys, std::int64_t y_max, double ladder_ratio,
                                    std::optional<std::int64_t> exhaustive_up_to, const BuildOptions& options) {
    if (sys.n() > 4) throw InvalidArgument("build_sequence_guided: n > 4 unsupported");
    ScanOptions opt;
    opt.half = true;
    opt.limit = y_max;
    opt.exhaustive_up_to = exhaustive_up_to.value_or(default_exhaustive_bound(sys.n()));
    if (opt.exhaustive_up_to < 1) throw InvalidArgument("build_sequence_guided: exhaustive_up_to must be >= 1");
    opt.ladder_ratio = ladder_ratio;
    opt.budget = options.budget;
    EngineKind kind = y_max <= opt.exhaustive_up_to ? EngineKind::exhaustive : EngineKind::reduction_guided;
    return run_scan(sys, y_max, opt, kind);
}

SequenceCheck validate_lemma1(const BestApproxSeq& seq, int n, int m) {
    SequenceCheck out;
    std::size_t step = 1;
    for (int k = 0; k < m + n; ++k) step *= 3;
    const auto& it = seq.items;
    if (it.size() <= step) {
        out.applicable = false;
        out.detail = "not applicable: " + std::to_string(it.size()) + " items, need more than " + std::to_string(step);
        return out;
    }
    out.min_margin = INFINITY;
    // 1-based: Y_{i+step} >= 2 Y_{i+1} for i + step <= size
    for (std::size_t i = 1; i + step <= it.size(); ++i) {
        std::int64_t far = it[i + step - 1].Y, near = it[i].Y;
        ++out.checked;
        double margin = std::log2(static_cast<double>(far) / static_cast<double>(near)) - 1.0;
        out.min_margin = std::min(out.min_margin, margin);
        if (far < 2 * near) {
            ++out.violations;
            if (!out.first_violation) out.first_violation = i;
        }
    }
    out.pass = out.violations == 0;
    out.detail = std::to_string(out.checked) + " indices checked";
    return out;
}

SequenceCheck validate_dirichlet(const BestApproxSeq& seq, int n, int m) {
    SequenceCheck out;
    out.min_margin = INFINITY;
    const auto& it = seq.items;
    for (std::size_t i = 0; i + 1 < it.size(); ++i) {
        // M_i^m Y_{i+1}^n <= 1, all in exact-exponent ball arithmetic
        const CertifiedReal& M = it[i].M;
        CertifiedReal p = M;
        for (int k = 1; k < m; ++k) p = p * M;
        mpz_class y = it[i + 1].Y;
        mpz_class yn;
        mpz_pow_ui(yn.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(n));
        CertifiedReal prod = p * CertifiedReal::from_mpz(yn, M.precision());
        ++out.checked;
        out.min_margin = std::min(out.min_margin, 1.0 - prod.to_double());
        BigFloat lo = prod.lower();
        if (mpfr_cmp_ui(lo.get(), 1) > 0) {
            ++out.violations;
            if (!out.first_violation) out.first_violation = i + 1;
        }
    }
    if (out.checked == 0) out.min_margin = 0;
    out.pass = out.violations == 0;
    out.detail = std::to_string(out.checked) + " indices checked";
    return out;
}

std::size_t lemma2_last_violation(const BestApproxSeq& seq, std::span<const CertifiedReal> theta, double delta) {
    if (delta <= 0) throw InvalidArgument("lemma2: delta must be positive");
    if (theta.size() != static_cast<std::size_t>(seq.n)) throw InvalidArgument("lemma2: theta has the wrong length");
    std::size_t last = 0;
    for (std::size_t i = 0; i < seq.items.size(); ++i) {
        const auto& it = seq.items[i];
        CertifiedReal s = CertifiedReal::from_int(0, theta[0].precision());
        for (std::size_t k = 0; k < theta.size(); ++k) s = s + theta[k].mul_int(it.y[k]);
        CertifiedReal d = frac_dist(s);
        CertifiedReal bound = pow_positive(CertifiedReal::from_int(it.Y, d.precision()), -delta);
        // a violation unless the distance is certified >= the bound
        BigFloat dl = d.lower(), bu = bound.upper();
        if (mpfr_cmp(dl.get(), bu.get()) < 0) last = i + 1;
    }
    return last;
}

std::size_t Lemma2Report::count_beyond(std::size_t index) const {
    std::size_t c = 0;
    for (auto v : last_violation)
        if (v > index) ++c;
    return c;
}

Lemma2Report lemma2_statistical_check(const BestApproxSeq& seq, double delta, std::size_t theta_samples,
                                      std::uint64_t seed) {
    Lemma2Report rep;
    rep.delta = delta;
    rep.seed = seed;
    int prec = seq.items.empty() ? 128 : seq.items.front().M.precision();
    for (std::size_t s = 0; s < theta_samples; ++s) {
        RealVector theta;
        for (int k = 0; k < seq.n; ++k)
            theta.push_back(uniform_dyadic(seed, s * 16 + static_cast<std::uint64_t>(k), 64, prec));
        std::size_t v = lemma2_last_violation(seq, theta, delta);
        rep.last_violation.push_back(v);
        if (v != 0 && v == seq.items.size()) ++rep.exceptional;
    }
    return rep;
}

bool sequence_invariants_hold(const BestApproxSeq& seq) {
    if (seq.items.empty()) return true;
    if (seq.items.front().Y != 1) return false;
    for (std::size_t i = 1; i < seq.items.size(); ++i) {
        if (seq.items[i].Y <= seq.items[i - 1].Y) return false;
        try {
            if (!certified_less_than(seq.items[i].M, seq.items[i - 1].M)) return false;
        } catch (const Indeterminate&) {
            return false;
        }
    }
    for (const auto& it : seq.items) {
        if (sup_norm(it.y) != it.Y) return false;
        if (canonical(it.y) != it.y) return false;
    }
    return true;
}

}  // namespace dioph
