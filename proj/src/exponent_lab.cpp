#include "dioph/exponent_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dioph/records.hpp"
#include "dioph/rng.hpp"

namespace dioph {

std::string exponent_kind_name(ExponentKind k) {
    switch (k) {
        case ExponentKind::w_hom: return "w_hom";
        case ExponentKind::w_hat_hom: return "w_hat_hom";
        case ExponentKind::w_inhom: return "w_inhom";
        case ExponentKind::w_hat_inhom: return "w_hat_inhom";
    }
    return "?";
}

double ExponentEstimate::value() const {
    return kind == ExponentKind::w_hom || kind == ExponentKind::w_inhom ? ratio_limsup_proxy : ratio_liminf_proxy;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InsufficientData("median of an empty list");
    std::sort(values.begin(), values.end());
    std::size_t h = values.size() / 2;
    return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

namespace {

struct RatioPoint {
    std::size_t index;  // 1-based record index
    double num;         // -log of the value
    double den;         // log of the norm
    bool flagged;
};

// -log of a certified positive value; falls back to the upper end when the
// enclosure reaches 0.
std::pair<double, bool> neg_log(const CertifiedReal& v) {
    BigFloat lo = v.lower();
    if (mpfr_sgn(lo.get()) > 0) return {-v.center().log_abs(), false};
    BigFloat hi = v.upper();
    if (mpfr_sgn(hi.get()) <= 0) return {INFINITY, true};
    return {-hi.log_abs(), true};
}

ExponentEstimate estimate(ExponentKind kind, const std::vector<RatioPoint>& pts, TailWindow window,
                          std::int64_t truncation) {
    if (window.fraction <= 0 || window.fraction > 1) throw InvalidArgument("tail window fraction must be in (0, 1]");
    std::size_t count = pts.size();
    auto keep = static_cast<std::size_t>(std::ceil(window.fraction * static_cast<double>(count)));
    keep = std::max(keep, window.minimum);
    if (keep > count || count == 0)
        throw InsufficientData("exponent estimate: " + std::to_string(count) + " ratios, window needs " +
                               std::to_string(keep));
    ExponentEstimate e;
    e.kind = kind;
    e.truncation_bound = truncation;
    std::size_t start = count - keep;
    e.window_begin = pts[start].index;
    e.window_end = pts.back().index;
    e.ratio_limsup_proxy = -INFINITY;
    e.ratio_liminf_proxy = INFINITY;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < count; ++i) {
        const auto& p = pts[i];
        double r = p.num / p.den;
        e.ratio_limsup_proxy = std::max(e.ratio_limsup_proxy, r);
        e.ratio_liminf_proxy = std::min(e.ratio_liminf_proxy, r);
        e.flagged = e.flagged || p.flagged;
        sx += p.den;
        sy += p.num;
        sxx += p.den * p.den;
        sxy += p.den * p.num;
    }
    double k = static_cast<double>(keep);
    double var = sxx - sx * sx / k;
    e.regression_slope = var > 0 ? (sxy - sx * sy / k) / var : e.ratio_limsup_proxy;
    return e;
}

template <class Items, class Norm, class Value>
std::pair<ExponentEstimate, ExponentEstimate> two_estimates(const Items& items, Norm norm, Value value,
                                                            ExponentKind wk, ExponentKind hk, TailWindow window,
                                                            std::int64_t truncation, std::size_t min_items) {
    if (items.size() < min_items)
        throw InsufficientData("exponent estimates need at least " + std::to_string(min_items) + " records, got " +
                               std::to_string(items.size()));
    std::vector<RatioPoint> w_pts, h_pts;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto [num, flag] = neg_log(value(items[i]));
        if (norm(items[i]) > 1)
            w_pts.push_back({i + 1, num, std::log(static_cast<double>(norm(items[i]))), flag});
        if (i + 1 < items.size())
            h_pts.push_back({i + 1, num, std::log(static_cast<double>(norm(items[i + 1]))), flag});
    }
    return {estimate(wk, w_pts, window, truncation), estimate(hk, h_pts, window, truncation)};
}

}  // namespace

std::pair<ExponentEstimate, ExponentEstimate> hom_exponents(const BestApproxSeq& seq, TailWindow window) {
    return two_estimates(
        seq.items, [](const ApproxItem& it) { return it.Y; }, [](const ApproxItem& it) -> const CertifiedReal& { return it.M; },
        ExponentKind::w_hom, ExponentKind::w_hat_hom, window, seq.y_max, 8);
}

std::string InhomRecordSeq::to_table() const {
    std::ostringstream out;
    out << "k,X";
    for (int j = 0; j < m; ++j) out << ",x" << (j + 1);
    out << ",D,D_radius,engine\n";
    for (std::size_t k = 0; k < items.size(); ++k) {
        const auto& it = items[k];
        out << (k + 1) << ',' << it.X;
        for (auto c : it.x) out << ',' << c;
        out << ',' << it.D.center().to_string(15) << ',' << it.D.radius().to_string(3) << ','
            << engine_name(it.engine) << '\n';
    }
    return out.str();
}

std::int64_t default_inhom_exhaustive_bound(int m) {
    switch (m) {
        case 1: return 1'000'000;
        case 2: return 2000;
        case 3: return 100;
        default: return 20;
    }
}

InhomRecordSeq build_inhom_records(const LinearSystem& sys, std::span<const CertifiedReal> theta, std::int64_t x_max,
                                   const InhomOptions& options) {
    if (x_max < 1) throw InvalidArgument("build_inhom_records: X_max must be >= 1");
    validate_theta(sys, theta);
    bool zero_theta = std::all_of(theta.begin(), theta.end(),
                                  [](const CertifiedReal& t) { return t.is_exact() && mpfr_zero_p(t.center().get()); });
    if (zero_theta && !options.exclude_zero)
        throw InvalidArgument("build_inhom_records: theta = 0 needs exclude_zero (the zero solution is vacuous)");

    FixedForms forms = sys.row_forms(theta);
    RealVector th(theta.begin(), theta.end());
    ExactEval exact = [&sys, &th](std::span<const std::int64_t> x) { return eval_L_inhom(sys, x, th); };
    ScanOptions opt;
    opt.half = zero_theta;
    opt.include_zero = !options.exclude_zero;
    opt.limit = x_max;
    opt.exhaustive_up_to = options.exhaustive_up_to.value_or(default_inhom_exhaustive_bound(sys.m()));
    opt.ladder_ratio = options.ladder_ratio;
    opt.budget = options.budget;
    ScanResult r = scan_records(forms, exact, opt);

    InhomRecordSeq out;
    out.n = sys.n();
    out.m = sys.m();
    out.theta = th;
    out.exhaustive_up_to = std::min(opt.exhaustive_up_to, x_max);
    out.x_max = x_max;
    out.exclude_zero = options.exclude_zero;
    out.partial = r.budget_hit;
    out.evaluations = r.evaluations;
    const int guard = sys.precision() / 2;
    for (auto& rec : r.records) {
        InhomItem it;
        it.x = std::move(rec.v);
        it.X = std::max<std::int64_t>(1, rec.norm);
        it.D = std::move(rec.value);
        it.engine = rec.guided ? EngineKind::reduction_guided : EngineKind::exhaustive;
        BigFloat lo = it.D.lower();
        if (mpfr_sgn(lo.get()) <= 0 || mpfr_get_exp(lo.get()) < -guard) out.near_zero = true;
        out.items.push_back(std::move(it));
    }
    if (r.budget_hit) throw BudgetExceeded(r.budget_message, r.evaluations);
    return out;
}

std::pair<ExponentEstimate, ExponentEstimate> inhom_exponents(const InhomRecordSeq& records, TailWindow window) {
    return two_estimates(
        records.items, [](const InhomItem& it) { return it.X; },
        [](const InhomItem& it) -> const CertifiedReal& { return it.D; }, ExponentKind::w_inhom,
        ExponentKind::w_hat_inhom, window, records.x_max, 8);
}

GenericReport generic_theorem_experiment(const LinearSystem& sys, std::size_t theta_samples, std::int64_t x_max,
                                         std::int64_t y_max, std::uint64_t seed, const GenericOptions& options) {
    GenericReport rep;
    rep.seed = seed;
    rep.tolerance = options.tolerance;
    BuildOptions bo;
    bo.budget = options.budget;
    BestApproxSeq seq = build_sequence_guided(sys, y_max, options.ladder_ratio, options.exhaustive_up_to, bo);
    auto [w, wh] = hom_exponents(seq, options.window);
    rep.hom_w = w;
    rep.hom_w_hat = wh;
    rep.predicted_w = 1.0 / wh.value();
    rep.predicted_w_hat = 1.0 / w.value();

    InhomOptions io;
    io.exhaustive_up_to = options.inhom_exhaustive_up_to;
    io.ladder_ratio = options.ladder_ratio;
    io.budget = options.budget;
    std::vector<double> ws, whs;
    for (std::size_t s = 0; s < theta_samples; ++s) {
        GenericSample g;
        g.index = s;
        for (int k = 0; k < sys.n(); ++k)
            g.theta.push_back(uniform_dyadic(seed, s * 16 + static_cast<std::uint64_t>(k), 64, sys.precision()));
        InhomRecordSeq rec = build_inhom_records(sys, g.theta, x_max, io);
        g.records = rec.size();
        std::pair<ExponentEstimate, ExponentEstimate> est;
        try {
            est = inhom_exponents(rec, options.window);
        } catch (const InsufficientData&) {
            g.insufficient = true;
            ++rep.insufficient_samples;
            rep.samples.push_back(std::move(g));
            continue;
        }
        auto& [iw, iwh] = est;
        g.w = iw;
        g.w_hat = iwh;
        g.flagged = rec.near_zero || iw.flagged || iwh.flagged;
        ws.push_back(iw.value());
        whs.push_back(iwh.value());
        if (iw.value() < rep.predicted_w - options.tolerance || iwh.value() < rep.predicted_w_hat - options.tolerance)
            ++rep.lower_bound_violations;
        rep.samples.push_back(std::move(g));
    }
    if (!ws.empty()) {
        rep.median_w = median(ws);
        rep.median_w_hat = median(whs);
    }
    return rep;
}

}  // namespace dioph
