#include "dioph/transference.hpp"

#include <cmath>
#include <sstream>

#include "dioph/shells.hpp"

namespace dioph {

mpq_class kappa(int m, int n) {
    if (m < 1 || n < 1) throw InvalidArgument("kappa: m and n must be >= 1");
    mpz_class f = 1;
    for (int k = 2; k <= m + n; ++k) f *= k;
    mpq_class out(f * f);
    mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(m + n - 1));
    out.canonicalize();
    return out;
}

namespace {

double box_count(int dim, std::int64_t r) { return std::pow(2.0 * static_cast<double>(r) + 1.0, dim); }

CertifiedReal ratio(const mpq_class& k, double d, int prec) {
    return CertifiedReal::from_mpq(k, prec) / CertifiedReal::from_double(d, std::max(prec, 64));
}

}  // namespace

HypothesisReport check_hypothesis(const LinearSystem& sys, double X, double Y, std::uint64_t budget) {
    if (!(X > 0) || !(Y > 0) || !std::isfinite(X) || !std::isfinite(Y))
        throw InvalidArgument("check_hypothesis: X and Y must be positive and finite");
    HypothesisReport rep;
    rep.threshold = ratio(kappa(sys.m(), sys.n()), X, sys.precision());
    rep.checked_to = static_cast<std::int64_t>(std::floor(Y));
    if (rep.checked_to < 1) return rep;
    if (box_count(sys.n(), rep.checked_to) / 2 > static_cast<double>(budget))
        throw BudgetExceeded("check_hypothesis: enumeration to Y = " + std::to_string(rep.checked_to) +
                                 " exceeds the budget",
                             0);
    FixedForms forms = sys.column_forms();
    u128 t_hi = ceil_ulps(rep.threshold.upper());
    for (std::int64_t r = 1; r <= rep.checked_to && rep.holds; ++r) {
        for_each_in_shell(sys.n(), r, true, [&](std::span<const std::int64_t> y) {
            if (!rep.holds) return;
            ++rep.evaluations;
            UlpBall b = forms.evaluate(y);
            if (b.lo() >= t_hi) return;
            CertifiedReal v;
            try {
                v = eval_M(sys, y);
            } catch (const ZeroNotExcluded&) {
                rep.holds = false;
                rep.violating = IntVector(y.begin(), y.end());
                return;
            }
            BigFloat up = v.upper(), tl = rep.threshold.lower();
            if (mpfr_less_p(up.get(), tl.get())) {
                rep.holds = false;
                rep.violating = IntVector(y.begin(), y.end());
                rep.value = v;
            } else {
                BigFloat lo = v.lower(), th = rep.threshold.upper();
                if (mpfr_less_p(lo.get(), th.get())) ++rep.boundary_cases;
            }
        });
    }
    return rep;
}

CertifiedReal min_M_up_to(const LinearSystem& sys, std::int64_t Y, std::uint64_t budget) {
    if (Y < 1) throw InvalidArgument("min_M_up_to: Y must be >= 1");
    if (box_count(sys.n(), Y) / 2 > static_cast<double>(budget))
        throw BudgetExceeded("min_M_up_to: enumeration exceeds the budget", 0);
    FixedForms forms = sys.column_forms();
    // two passes: the smallest fast upper end, then exact values near it
    u128 best_hi = kHalfTorus;
    for_each_in_ball(sys.n(), 1, Y, true, [&](std::span<const std::int64_t> y) {
        best_hi = std::min(best_hi, forms.evaluate(y).hi());
    });
    std::optional<CertifiedReal> best;
    for_each_in_ball(sys.n(), 1, Y, true, [&](std::span<const std::int64_t> y) {
        if (forms.evaluate(y).lo() > best_hi) return;
        CertifiedReal v = eval_M(sys, y);
        if (!best) {
            best = v;
            return;
        }
        BigFloat a = v.upper(), b = best->upper();
        if (mpfr_less_p(a.get(), b.get())) best = v;
    });
    return *best;
}

TransferenceCertificate lemma3_solve(const LinearSystem& sys, std::span<const CertifiedReal> theta, double X,
                                     double Y, std::uint64_t budget) {
    validate_theta(sys, theta);
    HypothesisReport hyp = check_hypothesis(sys, X, Y, budget);
    if (!hyp.holds) throw InvalidArgument("lemma3_solve: the lower bound M(y) >= kappa/X fails");

    TransferenceCertificate cert;
    cert.X = X;
    cert.Y = Y;
    cert.kappa = kappa(sys.m(), sys.n());
    cert.hypothesis_checked_to = hyp.checked_to;
    cert.bound = ratio(cert.kappa, Y, sys.precision());
    cert.evaluations = hyp.evaluations;

    auto xr = static_cast<std::int64_t>(std::floor(X));
    RealVector th(theta.begin(), theta.end());
    FixedForms forms = sys.row_forms(th);
    u128 z_hi = ceil_ulps(cert.bound.upper());
    BigFloat z_lower = cert.bound.lower();

    int m = sys.m();
    IntVector x(static_cast<std::size_t>(m), -xr);
    for (;;) {
        if (++cert.evaluations > budget)
            throw BudgetExceeded("lemma3_solve: search budget exhausted", cert.evaluations);
        UlpBall b = forms.evaluate(x);
        if (b.lo() <= z_hi) {
            CertifiedReal d = eval_L_inhom(sys, x, th);
            BigFloat up = d.upper();
            if (mpfr_lessequal_p(up.get(), z_lower.get())) {
                cert.solution_x = x;
                cert.achieved = d;
                return cert;
            }
        }
        int j = m - 1;
        for (; j >= 0; --j) {
            auto idx = static_cast<std::size_t>(j);
            if (x[idx] < xr) {
                ++x[idx];
                break;
            }
            x[idx] = -xr;
        }
        if (j < 0) break;
    }
    throw SearchExhausted("lemma3_solve: no x with |x| <= " + std::to_string(xr) + " meets the bound");
}

bool verify_certificate(const TransferenceCertificate& cert, const LinearSystem& sys,
                        std::span<const CertifiedReal> theta) {
    if (static_cast<int>(cert.solution_x.size()) != sys.m()) return false;
    if (static_cast<double>(sup_norm(cert.solution_x)) > cert.X) return false;
    int p = 2 * sys.precision();
    RealVector vals;
    for (int i = 0; i < sys.n(); ++i) {
        CertifiedReal t = theta[static_cast<std::size_t>(i)].with_precision(p);
        for (int j = 0; j < sys.m(); ++j)
            t = t + sys.entry(i, j).with_precision(p).mul_int(cert.solution_x[static_cast<std::size_t>(j)]);
        vals.push_back(t);
    }
    CertifiedReal d = vec_frac_dist(vals);
    CertifiedReal bound = ratio(cert.kappa, cert.Y, p);
    BigFloat du = d.upper(), bl = bound.lower();
    return mpfr_lessequal_p(du.get(), bl.get()) != 0;
}

std::string TransferenceCertificate::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "X=" << X << " Y=" << Y << " kappa=" << kappa.get_str() << " checked_to=" << hypothesis_checked_to
        << " x=(";
    for (std::size_t j = 0; j < solution_x.size(); ++j) out << (j ? "," : "") << solution_x[j];
    out << ") achieved=" << achieved.to_string(15) << " bound=" << bound.to_string(15);
    return out.str();
}

KhintchineAudit khintchine_audit(int n, int m, double w_A, double w_tA, double w_hat_A, double w_hat_tA,
                                 double tol) {
    if (n < 1 || m < 1) throw InvalidArgument("khintchine_audit: n and m must be >= 1");
    for (double v : {w_A, w_tA, w_hat_A, w_hat_tA, tol})
        if (!std::isfinite(v)) throw InvalidArgument("khintchine_audit: estimates must be finite");
    auto rhs = [&](double t) { return (m * t + m - 1) / ((n - 1) * t + n); };
    KhintchineAudit a;
    a.n = n;
    a.m = m;
    a.tol = tol;
    a.w_rhs = rhs(w_tA);
    a.w_margin = w_A - a.w_rhs;
    a.hat_rhs = rhs(w_hat_tA);
    a.hat_margin = w_hat_A - a.hat_rhs;
    a.w_pass = a.w_margin >= -tol;
    a.hat_pass = a.hat_margin >= -tol;
    return a;
}

}  // namespace dioph
