#include "dioph/records.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dioph/lattice.hpp"

namespace dioph {

namespace {

constexpr u128 kMaxU128 = ~static_cast<u128>(0);

struct Candidate {
    IntVector v;  // stored form (canonical in half mode)
    UlpBall fast;
    std::optional<CertifiedReal> exact;
};

class Selector {
public:
    Selector(const ExactEval& exact, bool half) : exact_(exact), half_(half) {}

    const CertifiedReal& exact_of(Candidate& c) {
        if (!c.exact) c.exact = exact_(c.v);
        return *c.exact;
    }

    // Certified M(a) < M(b); nullopt when the two are exactly equal.
    std::optional<bool> less(Candidate& a, Candidate& b) {
        if (a.fast.hi() < b.fast.lo()) return true;
        if (a.fast.lo() > b.fast.hi()) return false;
        const CertifiedReal& x = exact_of(a);
        const CertifiedReal& y = exact_of(b);
        if (x.is_exact() && y.is_exact() && mpfr_equal_p(x.center().get(), y.center().get())) return std::nullopt;
        if (certified_less_than(x, y)) return true;
        if (certified_less_than(y, x)) return false;
        return std::nullopt;
    }

    // Picks the shell minimum among candidates certified below the record.
    std::optional<Candidate> select(std::vector<Candidate>& shell, std::optional<Candidate>& record) {
        std::sort(shell.begin(), shell.end(),
                  [](const Candidate& a, const Candidate& b) { return a.fast.center < b.fast.center; });
        std::optional<Candidate> best;
        for (auto& c : shell) {
            if (record) {
                auto r = less(c, *record);
                if (!r || !*r) continue;
            }
            if (!best) {
                best = std::move(c);
                continue;
            }
            auto r = less(c, *best);
            if (r) {
                if (*r) best = std::move(c);
            } else if (c.v < best->v) {
                best = std::move(c);
            }
        }
        return best;
    }

private:
    const ExactEval& exact_;
    bool half_;
};

struct FastForms {
    int vars = 0;
    int forms = 0;
    u128 coef[FixedForms::kMaxForms][8] = {};
    u128 shift[FixedForms::kMaxForms] = {};
};

FastForms fast_from(const FixedForms& f) {
    if (f.vars() > 8) throw InvalidArgument("scan_records: too many variables");
    FastForms out;
    out.vars = f.vars();
    out.forms = f.forms();
    for (int k = 0; k < f.forms(); ++k) {
        out.shift[k] = f.shift(k).value;
        for (int j = 0; j < f.vars(); ++j) out.coef[k][j] = f.coefficient(k, j).value;
    }
    return out;
}

// Visits the shell |v| = norm (half or full). `accept(v, d)` receives each
// vector whose forms all have distance <= cut (cut may shrink during the
// visit through the reference). Returns the number of form evaluations.
template <class Accept>
std::uint64_t scan_shell(const FastForms& f, std::int64_t norm, bool half, const u128& cut, Accept&& accept) {
    const int dim = f.vars;
    std::uint64_t evals = 0;
    IntVector v(static_cast<std::size_t>(dim));
    std::int64_t lo[8], hi[8];
    u128 base[FixedForms::kMaxForms];
    for (int k = 0; k < dim; ++k) {
        for (int sign : {1, -1}) {
            if (half && sign < 0) continue;
            for (int j = 0; j < dim; ++j) {
                std::int64_t r = j < k ? norm - 1 : norm;
                lo[j] = -r;
                hi[j] = r;
            }
            lo[k] = hi[k] = sign * norm;
            int fast = dim - 1;
            if (fast == k) fast = dim - 2;
            for (int j = 0; j < dim; ++j) v[static_cast<std::size_t>(j)] = lo[j];
            for (;;) {
                // one line along the fast coordinate
                for (int q = 0; q < f.forms; ++q) {
                    u128 t = f.shift[q];
                    for (int j = 0; j < dim; ++j)
                        t += static_cast<u128>(static_cast<__int128>(v[static_cast<std::size_t>(j)])) * f.coef[q][j];
                    base[q] = t;
                }
                if (fast < 0) {
                    evals += static_cast<std::uint64_t>(f.forms);
                    u128 d = 0;
                    for (int q = 0; q < f.forms; ++q) d = std::max(d, torus_distance(base[q]));
                    if (d <= cut) accept(v, d);
                } else {
                    auto fi = static_cast<std::size_t>(fast);
                    std::int64_t count = hi[fast] - lo[fast] + 1;
                    evals += static_cast<std::uint64_t>(count) * static_cast<std::uint64_t>(f.forms);
                    for (std::int64_t s = 0; s < count; ++s) {
                        u128 d = 0;
                        int q = 0;
                        for (; q < f.forms; ++q) {
                            u128 dq = torus_distance(base[q]);
                            if (dq > cut) break;
                            if (dq > d) d = dq;
                        }
                        if (q == f.forms) {
                            v[fi] = lo[fast] + s;
                            accept(v, d);
                        }
                        for (int qq = 0; qq < f.forms; ++qq) base[qq] += f.coef[qq][fast];
                    }
                    v[fi] = lo[fast];
                }
                // advance the remaining coordinates
                int j = dim - 1;
                for (; j >= 0; --j) {
                    if (j == fast) continue;
                    auto idx = static_cast<std::size_t>(j);
                    if (v[idx] < hi[j]) {
                        ++v[idx];
                        break;
                    }
                    v[idx] = lo[j];
                }
                if (j < 0) break;
            }
        }
    }
    return evals;
}

mpz_class u128_to_mpz(u128 v) { return to_mpz(v); }

}  // namespace

ScanResult scan_records(const FixedForms& forms, const ExactEval& exact, const ScanOptions& options) {
    if (options.limit < 1) throw InvalidArgument("scan_records: limit must be >= 1");
    if (options.ladder_ratio <= 1.0) throw InvalidArgument("scan_records: ladder_ratio must exceed 1");
    const FastForms f = fast_from(forms);
    const int dim = f.vars;
    ScanResult result;
    Selector selector(exact, options.half);
    std::optional<Candidate> record;

    auto stored = [&](const IntVector& v) { return options.half ? canonical(v) : v; };
    auto push_record = [&](Candidate c, std::int64_t norm, bool guided) {
        record = c;
        ScanRecord r;
        r.v = c.v;
        r.norm = norm;
        r.guided = guided;
        result.records.push_back(std::move(r));
    };

    const std::int64_t exhaustive_end = std::min(options.limit, std::max<std::int64_t>(options.exhaustive_up_to, 1));
    try {
        for (std::int64_t Y = 1; Y <= exhaustive_end; ++Y) {
            u128 E = forms.error_bound(Y);
            std::vector<Candidate> shell;
            // a vector can only matter if its lower end is <= the record's upper end
            u128 cut = record ? saturating_add(record->fast.hi(), E) : kMaxU128;
            u128 shell_cut = cut;
            auto accept = [&](const IntVector& v, u128 d) {
                UlpBall b{d, E};
                shell.push_back({stored(v), b, std::nullopt});
                // no later vector whose lower end exceeds this one's upper end can win
                u128 tight = saturating_add(b.hi(), E);
                if (tight < shell_cut) shell_cut = tight;
            };
            if (Y == 1 && options.include_zero) {
                IntVector zero(static_cast<std::size_t>(dim), 0);
                UlpBall b = forms.evaluate(zero);
                b.err = std::max(b.err, E);
                if (!record) shell.push_back({zero, b, std::nullopt});
            }
            result.evaluations += scan_shell(f, Y, options.half, shell_cut, accept);
            if (result.evaluations > options.budget)
                throw BudgetExceeded("enumeration budget exceeded at norm " + std::to_string(Y), result.evaluations);
            auto best = selector.select(shell, record);
            if (best) push_record(std::move(*best), Y, false);
            result.completed_norm = Y;
        }

        std::int64_t B = exhaustive_end;
        while (B < options.limit) {
            if (!record) throw InvalidArgument("scan_records: guided phase needs an initial record");
            auto next = static_cast<std::int64_t>(std::floor(static_cast<double>(B) * options.ladder_ratio));
            std::int64_t Bp = std::min(options.limit, std::max(B + 1, next));
            u128 E = forms.error_bound(Bp);
            u128 T = saturating_add(record->fast.hi(), E);
            mpz_class Tz = u128_to_mpz(T);
            mpz_class W = (Tz + Bp - 1) / Bp;
            if (W < 1) W = 1;

            const int F = f.forms;
            const int d = dim + F;
            lattice::Basis basis(static_cast<std::size_t>(d), lattice::Row(static_cast<std::size_t>(d), 0));
            mpz_class one_torus = mpz_class(1) << 128;
            for (int j = 0; j < dim; ++j) {
                basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = W;
                for (int q = 0; q < F; ++q)
                    basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(dim + q)] = u128_to_mpz(f.coef[q][j]);
            }
            for (int q = 0; q < F; ++q)
                basis[static_cast<std::size_t>(dim + q)][static_cast<std::size_t>(dim + q)] = one_torus;
            lattice::Row target(static_cast<std::size_t>(d), 0);
            for (int q = 0; q < F; ++q) target[static_cast<std::size_t>(dim + q)] = -u128_to_mpz(f.shift[q]);
            lattice::lll_reduce(basis);

            mpz_class box = W * Bp;
            mpz_class r2 = dim * box * box + F * Tz * Tz;
            mpz_class radius;
            mpz_sqrt(radius.get_mpz_t(), r2.get_mpz_t());
            radius += 1;
            std::uint64_t remaining = options.budget > result.evaluations ? options.budget - result.evaluations : 0;
            std::uint64_t nodes = 0;
            auto points = lattice::enumerate_near(basis, target, radius, remaining, nodes);
            result.evaluations += nodes;

            std::vector<std::pair<std::int64_t, Candidate>> found;
            for (const auto& p : points) {
                IntVector v(static_cast<std::size_t>(dim));
                for (int j = 0; j < dim; ++j) {
                    mpz_class c = p[static_cast<std::size_t>(j)] / W;
                    v[static_cast<std::size_t>(j)] = c.get_si();
                }
                std::int64_t norm = sup_norm(v);
                if (norm <= B || norm > Bp) continue;
                UlpBall b = forms.evaluate(v);
                if (b.lo() > record->fast.hi()) continue;
                found.push_back({norm, {stored(v), b, std::nullopt}});
            }
            std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return a.second.v < b.second.v;
            });
            found.erase(std::unique(found.begin(), found.end(),
                                    [](const auto& a, const auto& b) { return a.second.v == b.second.v; }),
                        found.end());
            for (std::size_t i = 0; i < found.size();) {
                std::size_t j = i;
                std::vector<Candidate> shell;
                while (j < found.size() && found[j].first == found[i].first) shell.push_back(found[j++].second);
                auto best = selector.select(shell, record);
                if (best) push_record(std::move(*best), found[i].first, true);
                i = j;
            }
            B = Bp;
            result.completed_norm = B;
        }
    } catch (const BudgetExceeded& e) {
        result.budget_hit = true;
        result.budget_message = e.what();
    }

    for (auto& r : result.records) r.value = exact(r.v);
    return result;
}

}  // namespace dioph
