#include "dioph/adversarial.hpp"

#include <cmath>
#include <sstream>

#include "dioph/rng.hpp"
#include "dioph/shells.hpp"

namespace dioph {

namespace {

// Y_b >= (9n)^(1/2) Y_a  <=>  Y_b^2 >= 9n Y_a^2
bool grows(std::int64_t ya, std::int64_t yb, int n) {
    mpz_class a(static_cast<long>(ya)), b(static_cast<long>(yb));
    return b * b >= 9 * n * a * a;
}

// Y_{a+1} >= Y_b / (9n)
bool gap_ok(std::int64_t ya1, std::int64_t yb, int n) {
    return mpz_class(static_cast<long>(ya1)) * (9 * n) >= mpz_class(static_cast<long>(yb));
}

mpz_class floor_q(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

}  // namespace

PhiCheck verify_phi(const std::vector<std::int64_t>& Y, const std::vector<std::size_t>& phi, int n) {
    PhiCheck c;
    for (std::size_t i = 1; i < phi.size(); ++i) {
        std::size_t a = phi[i - 1], b = phi[i];
        bool ok_index = a >= 1 && b > a && b <= Y.size();
        bool g = ok_index && grows(Y[a - 1], Y[b - 1], n);
        bool h = ok_index && gap_ok(Y[a], Y[b - 1], n);
        if (!g) c.growth = false;
        if (!h) c.gap = false;
        if ((!g || !h) && !c.first_failure) c.first_failure = i + 1;
    }
    return c;
}

PhiSubsequence extract_phi(const std::vector<std::int64_t>& Y, const std::vector<IntVector>& y, int n) {
    if (n < 1) throw InvalidArgument("extract_phi: n must be >= 1");
    if (Y.size() != y.size()) throw InvalidArgument("extract_phi: norms and vectors differ in length");
    std::size_t N = Y.size();
    if (N == 0) throw TooShort("extract_phi: empty sequence");
    // longest chain from each index, scanning backwards
    std::vector<std::size_t> len(N, 1), next(N, N);
    for (std::size_t a = N; a-- > 0;) {
        for (std::size_t b = a + 1; b < N; ++b) {
            if (!grows(Y[a], Y[b], n) || !gap_ok(Y[a + 1], Y[b], n)) continue;
            if (len[b] + 1 > len[a]) {
                len[a] = len[b] + 1;
                next[a] = b;
            }
        }
    }
    PhiSubsequence out;
    out.n = n;
    out.factor = std::sqrt(9.0 * n);
    out.Y = Y;
    for (std::size_t a = 0; a < N; a = next[a]) {
        out.phi.push_back(a + 1);
        out.y.push_back(y[a]);
    }
    if (out.phi.size() < 3)
        throw TooShort("extract_phi: only " + std::to_string(out.phi.size()) + " indices satisfy the growth conditions");
    PhiCheck c = verify_phi(Y, out.phi, n);
    if (!c.pass()) throw Error("extract_phi: emitted indices fail verification at i = " + std::to_string(*c.first_failure));
    return out;
}

PhiSubsequence extract_phi(const BestApproxSeq& seq, int n) {
    std::vector<std::int64_t> Y;
    std::vector<IntVector> y;
    for (const auto& it : seq.items) {
        Y.push_back(it.Y);
        y.push_back(it.y);
    }
    return extract_phi(Y, y, n);
}

namespace {

struct Builder {
    const PhiSubsequence& phi;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::vector<DyadicBox> chain;
    std::size_t deepest = 0;

    Builder(const PhiSubsequence& p, std::uint64_t b) : phi(p), budget(b) {}

    static constexpr std::size_t kMaxSubBoxes = 1u << 16;

    // image of the box under theta -> y . theta
    static std::pair<mpq_class, mpq_class> image(const DyadicBox& b, const IntVector& y) {
        mpq_class lo = 0, hi = 0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            mpq_class c(static_cast<long>(y[j]));
            if (y[j] >= 0) {
                lo += c * b.lo[j];
                hi += c * b.hi[j];
            } else {
                lo += c * b.hi[j];
                hi += c * b.lo[j];
            }
        }
        return {lo, hi};
    }

    static bool qualifies(const DyadicBox& b, const IntVector& y) {
        auto [lo, hi] = image(b, y);
        mpz_class k = floor_q(lo);
        mpq_class quarter(1, 4), three(3, 4);
        return lo - k >= quarter && hi - k <= three;
    }

    static bool contains(const DyadicBox& outer, const DyadicBox& inner) {
        for (std::size_t j = 0; j < outer.lo.size(); ++j)
            if (inner.lo[j] < outer.lo[j] || inner.hi[j] > outer.hi[j]) return false;
        return true;
    }

    // qualifying sub-boxes at the first three useful subdivision levels
    std::vector<DyadicBox> candidates(const DyadicBox& box, const IntVector& y) {
        std::size_t n = y.size();
        std::vector<int> depth(n, 0);
        std::vector<DyadicBox> out;
        int found_levels = 0;
        for (int level = 0; level < 400 && found_levels < 3; ++level) {
            std::size_t count = 1;
            for (auto d : depth) {
                if (d >= 16 || count > kMaxSubBoxes) {
                    count = kMaxSubBoxes + 1;
                    break;
                }
                count <<= d;
            }
            if (count > kMaxSubBoxes) break;
            std::vector<DyadicBox> here;
            std::vector<std::size_t> idx(n, 0);
            for (;;) {
                DyadicBox s;
                for (std::size_t j = 0; j < n; ++j) {
                    mpq_class w = (box.hi[j] - box.lo[j]) / mpq_class(mpz_class(1) << depth[j]);
                    s.lo.push_back(box.lo[j] + w * static_cast<long>(idx[j]));
                    s.hi.push_back(s.lo.back() + w);
                }
                if (qualifies(s, y)) {
                    bool fresh = true;
                    for (const auto& o : out)
                        if (contains(o, s)) fresh = false;
                    if (fresh) here.push_back(std::move(s));
                }
                std::size_t j = n;
                while (j-- > 0) {
                    if (++idx[j] < (static_cast<std::size_t>(1) << depth[j])) break;
                    idx[j] = 0;
                }
                if (j == static_cast<std::size_t>(-1)) break;
            }
            if (!here.empty() || found_levels > 0) ++found_levels;
            for (auto& s : here) out.push_back(std::move(s));
            // split the coordinate carrying the widest image
            std::size_t best = n;
            mpq_class widest = 0;
            for (std::size_t j = 0; j < n; ++j) {
                mpq_class w = (box.hi[j] - box.lo[j]) / mpq_class(mpz_class(1) << depth[j]) *
                              mpq_class(std::abs(y[j]));
                if (w > widest) {
                    widest = w;
                    best = j;
                }
            }
            if (best == n) break;
            ++depth[best];
        }
        return out;
    }

    bool descend(const DyadicBox& box, std::size_t i) {
        if (i == phi.y.size()) return true;
        deepest = std::max(deepest, i);
        for (auto& c : candidates(box, phi.y[i])) {
            if (++nodes > budget) return false;
            chain.push_back(c);
            if (descend(c, i + 1)) return true;
            chain.pop_back();
        }
        return false;
    }
};

CertifiedReal form_distance(const IntVector& y, const RealVector& theta, int prec) {
    CertifiedReal t = CertifiedReal::from_int(0, prec);
    for (std::size_t j = 0; j < y.size(); ++j) t = t + theta[j].with_precision(prec).mul_int(y[j]);
    return frac_dist(t);
}

}  // namespace

AdversarialTarget build_theta(const PhiSubsequence& phi, int prec, std::uint64_t node_budget) {
    int n = phi.n;
    for (const auto& y : phi.y)
        if (static_cast<int>(y.size()) != n) throw InvalidArgument("build_theta: vector length differs from n");
    if (!phi.Y.empty() && !verify_phi(phi.Y, phi.phi, n).pass())
        throw InvalidArgument("build_theta: phi fails the growth conditions");
    DyadicBox unit;
    for (int j = 0; j < n; ++j) {
        unit.lo.emplace_back(0);
        unit.hi.emplace_back(1);
    }
    Builder b{phi, node_budget};
    b.chain.push_back(unit);
    if (!b.descend(unit, 0))
        throw NoQualifyingBox("build_theta: no nested box meets ||y . theta|| >= 1/4 at index " +
                                  std::to_string(b.deepest + 1),
                              b.deepest + 1);
    AdversarialTarget t;
    t.n = n;
    t.box_chain = std::move(b.chain);
    const DyadicBox& last = t.box_chain.back();
    t.final_width = 0;
    for (int j = 0; j < n; ++j) {
        auto jj = static_cast<std::size_t>(j);
        mpq_class c = (last.lo[jj] + last.hi[jj]) / 2;
        t.theta_exact.push_back(c);
        t.theta.push_back(CertifiedReal::from_mpq(c, prec));
        t.final_width = std::max(t.final_width, mpq_class(last.hi[jj] - last.lo[jj]));
    }
    for (std::size_t i = 0; i < phi.y.size(); ++i) {
        PhiCertificateRow row;
        row.i = i + 1;
        row.phi = i < phi.phi.size() ? phi.phi[i] : i + 1;
        row.y = phi.y[i];
        row.distance = form_distance(row.y, t.theta, 2 * prec);
        t.certificate.push_back(std::move(row));
    }
    if (!recheck_target(t, 2 * prec)) throw Error("build_theta: re-verification of the target failed");
    return t;
}

bool recheck_target(const AdversarialTarget& target, int prec) {
    BigFloat quarter(64);
    mpfr_set_d(quarter.get(), 0.25, MPFR_RNDN);
    for (const auto& row : target.certificate) {
        BigFloat lo = form_distance(row.y, target.theta, prec).lower();
        if (mpfr_less_p(lo.get(), quarter.get())) return false;
    }
    return true;
}

AdversarialTarget AdversarialTarget::uncertified(const RealVector& theta) {
    AdversarialTarget t;
    t.n = static_cast<int>(theta.size());
    t.theta = theta;
    return t;
}

std::string AdversarialTarget::to_text() const {
    std::ostringstream out;
    out << "theta=(";
    for (std::size_t j = 0; j < theta_exact.size(); ++j) out << (j ? "," : "") << theta_exact[j].get_str();
    out << ") boxes=" << box_chain.size() << " final_width=" << final_width.get_str() << '\n';
    out << "i,phi,y,distance\n";
    for (const auto& r : certificate) {
        out << r.i << ',' << r.phi << ",(";
        for (std::size_t j = 0; j < r.y.size(); ++j) out << (j ? " " : "") << r.y[j];
        out << ")," << r.distance.to_string(15) << '\n';
    }
    return out.str();
}

double prop1_constant(int n, int m) {
    return 1.0 / (72.0 * n * n * std::pow(8.0 * m, static_cast<double>(m) / n));
}

std::string Prop1Report::verdict() const {
    if (holds()) return "holds";
    return target_certified ? "violated" : "violated (target not adversarial)";
}

namespace {

CertifiedReal prop1_constant_ball(int n, int m, int prec) {
    CertifiedReal denom = CertifiedReal::from_int(72L * n * n, prec) *
                          pow_positive(CertifiedReal::from_int(8L * m, prec), static_cast<double>(m) / n);
    return CertifiedReal::from_int(1, prec) / denom;
}

void check_box_budget(int dim, std::int64_t r, std::uint64_t budget, const char* who) {
    if (std::pow(2.0 * static_cast<double>(r) + 1.0, dim) > static_cast<double>(budget))
        throw BudgetExceeded(std::string(who) + ": enumeration exceeds the budget", 0);
}

}  // namespace

Prop1Report verify_prop1_bound(const LinearSystem& sys, const AdversarialTarget& target, std::int64_t x_bound,
                               std::uint64_t budget) {
    if (x_bound < 1) throw InvalidArgument("verify_prop1_bound: x_bound must be >= 1");
    validate_theta(sys, target.theta);
    check_box_budget(sys.m(), x_bound, budget, "verify_prop1_bound");
    int n = sys.n(), m = sys.m(), prec = sys.precision();
    Prop1Report rep;
    rep.constant = prop1_constant(n, m);
    rep.x_bound = x_bound;
    rep.target_certified = !target.certificate.empty();
    rep.min_slack = INFINITY;
    CertifiedReal C = prop1_constant_ball(n, m, prec);
    FixedForms forms = sys.row_forms(target.theta);
    double e = static_cast<double>(m) / n;
    for (std::int64_t r = 1; r <= x_bound; ++r) {
        CertifiedReal B = C * pow_positive(CertifiedReal::from_int(r, prec), -e);
        u128 b_hi = ceil_ulps(B.upper());
        BigFloat b_lo = B.lower();
        double bd = B.to_double();
        for_each_in_shell(m, r, false, [&](std::span<const std::int64_t> x) {
            ++rep.evaluations;
            UlpBall d = forms.evaluate(x);
            rep.min_slack = std::min(rep.min_slack, d.to_double() / bd);
            if (d.lo() >= b_hi) return;
            CertifiedReal v = eval_L_inhom(sys, x, target.theta);
            BigFloat vu = v.upper();
            if (mpfr_less_p(vu.get(), b_lo.get())) {
                ++rep.violations;
                if (!rep.first_violation) rep.first_violation = IntVector(x.begin(), x.end());
            }
        });
    }
    return rep;
}

double SoftTargetReport::success_rate() const {
    if (samples.empty()) return 0;
    std::size_t ok = 0;
    for (const auto& s : samples) ok += s.violations == 0;
    return static_cast<double>(ok) / static_cast<double>(samples.size());
}

SoftTargetReport prop1_soft_check(const LinearSystem& sys, double w, const std::vector<RealVector>& thetas,
                                  std::int64_t x_min, std::int64_t x_bound) {
    if (x_min < 1 || x_bound < x_min) throw InvalidArgument("prop1_soft_check: need 1 <= x_min <= x_bound");
    if (!(w > 0) || !std::isfinite(w)) throw InvalidArgument("prop1_soft_check: w must be positive");
    int prec = sys.precision();
    SoftTargetReport rep;
    rep.w = w;
    rep.x_min = x_min;
    rep.x_bound = x_bound;
    for (const auto& theta : thetas) {
        validate_theta(sys, theta);
        FixedForms forms = sys.row_forms(theta);
        SoftSample s;
        s.theta = theta;
        for (std::int64_t r = x_min; r <= x_bound; ++r) {
            CertifiedReal B = pow_positive(CertifiedReal::from_int(r, prec), -w);
            u128 b_hi = ceil_ulps(B.upper());
            for_each_in_shell(sys.m(), r, false, [&](std::span<const std::int64_t> x) {
                if (forms.evaluate(x).lo() >= b_hi) return;
                CertifiedReal v = eval_L_inhom(sys, x, theta);
                BigFloat vl = v.lower(), bu = B.upper();
                // only a certified D >= |x|^-w counts as success
                if (mpfr_less_p(vl.get(), bu.get())) {
                    ++s.violations;
                    s.largest_violation = r;
                }
            });
        }
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

SoftTargetReport prop1_soft_target(const LinearSystem& sys, double w, double w_hat_tA_estimate, std::int64_t x_min,
                                   std::int64_t x_bound, std::size_t samples, std::uint64_t seed) {
    if (!(w_hat_tA_estimate > 0) || !(w > 1.0 / w_hat_tA_estimate))
        throw InvalidArgument("prop1_soft_target: w must exceed 1 / w_hat(tA)");
    std::vector<RealVector> thetas;
    for (std::size_t s = 0; s < samples; ++s) {
        RealVector th;
        for (int k = 0; k < sys.n(); ++k)
            th.push_back(uniform_dyadic(seed, s * 16 + static_cast<std::uint64_t>(k), 64, sys.precision()));
        thetas.push_back(std::move(th));
    }
    SoftTargetReport rep = prop1_soft_check(sys, w, thetas, x_min, x_bound);
    rep.seed = seed;
    return rep;
}

}  // namespace dioph
