#include "dioph/linear_system.hpp"

#include <algorithm>
#include <sstream>

#include "dioph/shells.hpp"

namespace dioph {

std::string Provenance::to_text() const {
    std::ostringstream out;
    out << generator;
    for (const auto& [k, v] : params) out << ' ' << k << '=' << v;
    return out.str();
}

LinearSystem::LinearSystem(int n, int m, RealVector entries, Provenance provenance)
    : n_(n), m_(m), precision_(0), entries_(std::move(entries)), provenance_(std::move(provenance)) {
    if (n < 1 || m < 1) throw InvalidArgument("LinearSystem: dimensions must be positive");
    if (entries_.size() != static_cast<std::size_t>(n * m))
        throw InvalidArgument("LinearSystem: entry count does not match n x m");
    precision_ = entries_.front().precision();
    for (const auto& e : entries_) {
        if (e.precision() != precision_)
            throw InvalidArgument("LinearSystem: entries mix precisions");
        // Entries must be accurate well inside a unit: the fixed-point path
        // reduces them mod 1.
        if (mpfr_cmp_d(e.radius().get(), 1e-6) > 0)
            throw InvalidArgument("LinearSystem: entry radius too large: " + e.to_string());
    }
}

LinearSystem LinearSystem::transpose() const {
    RealVector t;
    t.reserve(entries_.size());
    for (int j = 0; j < m_; ++j)
        for (int i = 0; i < n_; ++i) t.push_back(entry(i, j));
    Provenance p = provenance_;
    p.params.emplace_back("transposed", "1");
    return LinearSystem(m_, n_, std::move(t), std::move(p));
}

FixedForms LinearSystem::column_forms() const {
    FixedForms f(n_, m_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < m_; ++j) f.set_coefficient(j, i, to_torus(entry(i, j)));
    return f;
}

FixedForms LinearSystem::row_forms(std::span<const CertifiedReal> theta) const {
    validate_theta(*this, theta);
    FixedForms f(m_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < m_; ++j) f.set_coefficient(i, j, to_torus(entry(i, j)));
        f.set_shift(i, to_torus(theta[static_cast<std::size_t>(i)]));
    }
    return f;
}

std::string LinearSystem::to_text() const {
    std::ostringstream out;
    int digits = static_cast<int>(precision_ * 0.30103) + 2;
    out << "system n=" << n_ << " m=" << m_ << " precision=" << precision_ << '\n';
    out << "provenance " << provenance_.to_text() << '\n';
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < m_; ++j)
            out << "entry " << i << ' ' << j << ' ' << entry(i, j).to_string(digits) << '\n';
    return out.str();
}

bool DualityWitness::holds() const {
    BigFloat lo = lhs.lower(), hi = rhs.upper();
    return mpfr_lessequal_p(lo.get(), hi.get());
}

std::int64_t sup_norm(std::span<const std::int64_t> v) {
    std::int64_t r = 0;
    for (auto c : v) r = std::max(r, c < 0 ? -c : c);
    return r;
}

IntVector canonical(IntVector v) {
    for (auto c : v) {
        if (c == 0) continue;
        if (c < 0)
            for (auto& x : v) x = -x;
        break;
    }
    return v;
}

void validate_theta(const LinearSystem& sys, std::span<const CertifiedReal> theta) {
    if (theta.size() != static_cast<std::size_t>(sys.n()))
        throw InvalidArgument("theta must have n components");
    for (const auto& t : theta) {
        if (!t.is_exact() && t.precision() != sys.precision())
            throw InvalidArgument("theta mixes precisions with the system");
    }
}

RealVector zero_theta(int n, int prec) {
    return RealVector(static_cast<std::size_t>(n), CertifiedReal::from_int(0, prec));
}

CertifiedReal eval_M(const LinearSystem& sys, std::span<const std::int64_t> y) {
    if (y.size() != static_cast<std::size_t>(sys.n())) throw InvalidArgument("eval_M: y must have n components");
    bool zero = std::all_of(y.begin(), y.end(), [](std::int64_t c) { return c == 0; });
    if (zero) return CertifiedReal::from_int(0, sys.precision());
    RealVector values;
    for (int j = 0; j < sys.m(); ++j) {
        CertifiedReal acc = CertifiedReal::from_int(0, sys.precision());
        for (int i = 0; i < sys.n(); ++i) acc = acc + sys.entry(i, j).mul_int(y[static_cast<std::size_t>(i)]);
        values.push_back(std::move(acc));
    }
    CertifiedReal out = vec_frac_dist(values);
    if (out.contains_zero()) {
        if (out.is_exact()) throw DegenerateForm("M(y) = 0 for a nonzero y: integer relation");
        throw ZeroNotExcluded("M(y) not separated from 0: " + out.to_string());
    }
    return out;
}

CertifiedReal eval_L_inhom(const LinearSystem& sys, std::span<const std::int64_t> x,
                           std::span<const CertifiedReal> theta) {
    if (x.size() != static_cast<std::size_t>(sys.m())) throw InvalidArgument("eval_L_inhom: x must have m components");
    validate_theta(sys, theta);
    RealVector values;
    for (int i = 0; i < sys.n(); ++i) {
        CertifiedReal acc = theta[static_cast<std::size_t>(i)];
        for (int j = 0; j < sys.m(); ++j) acc = acc + sys.entry(i, j).mul_int(x[static_cast<std::size_t>(j)]);
        values.push_back(std::move(acc));
    }
    return vec_frac_dist(values);
}

DualityWitness duality_check(const LinearSystem& sys, std::span<const std::int64_t> x,
                             std::span<const std::int64_t> y, std::span<const CertifiedReal> theta) {
    validate_theta(sys, theta);
    if (y.size() != static_cast<std::size_t>(sys.n())) throw InvalidArgument("duality_check: y must have n components");
    int prec = sys.precision();
    CertifiedReal dot = CertifiedReal::from_int(0, prec);
    for (int i = 0; i < sys.n(); ++i) dot = dot + theta[static_cast<std::size_t>(i)].mul_int(y[static_cast<std::size_t>(i)]);
    CertifiedReal lhs = frac_dist(dot);

    bool y_zero = std::all_of(y.begin(), y.end(), [](std::int64_t c) { return c == 0; });
    CertifiedReal my = CertifiedReal::from_int(0, prec);
    if (!y_zero) {
        RealVector values;
        for (int j = 0; j < sys.m(); ++j) {
            CertifiedReal acc = CertifiedReal::from_int(0, prec);
            for (int i = 0; i < sys.n(); ++i) acc = acc + sys.entry(i, j).mul_int(y[static_cast<std::size_t>(i)]);
            values.push_back(std::move(acc));
        }
        my = vec_frac_dist(values);
    }
    CertifiedReal lx = eval_L_inhom(sys, x, theta);
    CertifiedReal rhs = lx.mul_int(sys.n() * sup_norm(y)) + my.mul_int(sys.m() * sup_norm(x));
    return DualityWitness{IntVector(x.begin(), x.end()), IntVector(y.begin(), y.end()), lhs, rhs};
}

DegeneracyReport degeneracy_probe(const LinearSystem& sys, std::int64_t height_bound,
                                  const PrecisionContext& ctx) {
    if (height_bound < 1) throw InvalidArgument("degeneracy_probe: height_bound must be >= 1");
    DegeneracyReport report;
    report.height_bound = height_bound;
    report.threshold_exponent = -(ctx.mantissa_bits / 2);
    FixedForms forms = sys.column_forms();

    BigFloat threshold(64);
    mpfr_set_ui_2exp(threshold.get(), 1, report.threshold_exponent, MPFR_RNDN);
    u128 threshold_ulps = floor_ulps(threshold);

    for (std::int64_t r = 1; r <= height_bound && !report.relation; ++r) {
        for_each_in_shell(sys.n(), r, true, [&](std::span<const std::int64_t> y) {
            if (report.relation) return;
            UlpBall b = forms.evaluate(y);
            if (b.lo() >= threshold_ulps) return;
            // Re-evaluate at full precision before declaring a relation.
            RealVector values;
            for (int j = 0; j < sys.m(); ++j) {
                CertifiedReal acc = CertifiedReal::from_int(0, sys.precision());
                for (int i = 0; i < sys.n(); ++i) acc = acc + sys.entry(i, j).mul_int(y[static_cast<std::size_t>(i)]);
                values.push_back(std::move(acc));
            }
            CertifiedReal value = vec_frac_dist(values);
            BigFloat up = value.upper();
            if (mpfr_less_p(up.get(), threshold.get())) {
                report.relation = canonical(IntVector(y.begin(), y.end()));
                report.value = value;
            }
        });
    }
    return report;
}

}  // namespace dioph
