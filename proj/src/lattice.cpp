#include "dioph/lattice.hpp"

#include <cmath>
#include <functional>

#include "dioph/errors.hpp"

namespace dioph::lattice {

namespace {

mpz_class dot(const Row& a, const Row& b) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// round(a / b) for b > 0, halves away from zero
mpz_class round_div(const mpz_class& a, const mpz_class& b) {
    mpz_class twice = 2 * a + (a >= 0 ? b : mpz_class(-b));
    mpz_class q;
    mpz_tdiv_q(q.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * b).get_mpz_t());
    return q;
}

mpz_class exact_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

long double scaled(const mpz_class& v, long shift) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::ldexp(static_cast<long double>(m), static_cast<int>(e - shift));
}

}  // namespace

// Integral LLL after Cohen, "A Course in Computational Algebraic Number
// Theory", algorithm 2.6.7; indices are 1-based as in the book.
void lll_reduce(Basis& basis, const mpq_class& delta) {
    const int n = static_cast<int>(basis.size());
    if (n <= 1) return;
    Basis b(static_cast<std::size_t>(n + 1));
    for (int i = 1; i <= n; ++i) b[static_cast<std::size_t>(i)] = basis[static_cast<std::size_t>(i - 1)];
    std::vector<mpz_class> d(static_cast<std::size_t>(n + 1));
    std::vector<std::vector<mpz_class>> lam(static_cast<std::size_t>(n + 1),
                                            std::vector<mpz_class>(static_cast<std::size_t>(n + 1)));
    auto L = [&](int k, int j) -> mpz_class& { return lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; };
    auto D = [&](int k) -> mpz_class& { return d[static_cast<std::size_t>(k)]; };
    auto B = [&](int k) -> Row& { return b[static_cast<std::size_t>(k)]; };
    const mpz_class dp = delta.get_num(), dq = delta.get_den();

    auto red = [&](int k, int l) {
        if (2 * abs(L(k, l)) <= D(l)) return;
        mpz_class q = round_div(L(k, l), D(l));
        for (std::size_t c = 0; c < B(k).size(); ++c) B(k)[c] -= q * B(l)[c];
        L(k, l) -= q * D(l);
        for (int i = 1; i < l; ++i) L(k, i) -= q * L(l, i);
    };
    int kmax = 1;
    auto swap_k = [&](int k) {
        std::swap(B(k), B(k - 1));
        for (int j = 1; j <= k - 2; ++j) std::swap(L(k, j), L(k - 1, j));
        mpz_class lambda = L(k, k - 1);
        mpz_class bb = exact_div(D(k - 2) * D(k) + lambda * lambda, D(k - 1));
        for (int i = k + 1; i <= kmax; ++i) {
            mpz_class t = L(i, k);
            L(i, k) = exact_div(D(k) * L(i, k - 1) - lambda * t, D(k - 1));
            L(i, k - 1) = exact_div(bb * t + lambda * L(i, k), D(k));
        }
        D(k - 1) = bb;
    };

    D(0) = 1;
    D(1) = dot(B(1), B(1));
    int k = 2;
    while (k <= n) {
        if (k > kmax) {
            kmax = k;
            for (int j = 1; j <= k; ++j) {
                mpz_class u = dot(B(k), B(j));
                for (int i = 1; i < j; ++i) u = exact_div(D(i) * u - L(k, i) * L(j, i), D(i - 1));
                if (j < k)
                    L(k, j) = u;
                else {
                    if (u == 0) throw InvalidArgument("lll_reduce: dependent rows");
                    D(k) = u;
                }
            }
        }
        red(k, k - 1);
        // Lovasz: d_k d_{k-2} >= delta d_{k-1}^2 - lambda^2
        if (dq * D(k) * D(k - 2) < dp * D(k - 1) * D(k - 1) - dq * L(k, k - 1) * L(k, k - 1)) {
            swap_k(k);
            k = std::max(2, k - 1);
        } else {
            for (int l = k - 2; l >= 1; --l) red(k, l);
            ++k;
        }
    }
    for (int i = 1; i <= n; ++i) basis[static_cast<std::size_t>(i - 1)] = std::move(B(i));
}

std::vector<Row> enumerate_near(const Basis& reduced, const Row& target, const mpz_class& radius,
                                std::uint64_t node_budget, std::uint64_t& nodes) {
    const std::size_t d = reduced.size();
    const std::size_t dim = target.size();
    const long shift = static_cast<long>(mpz_sizeinbase(radius.get_mpz_t(), 2));

    std::vector<std::vector<long double>> bs(d, std::vector<long double>(dim));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < dim; ++c) bs[i][c] = scaled(reduced[i][c], shift);

    // Gram-Schmidt in long double on the reduced (well conditioned) basis.
    std::vector<std::vector<long double>> star = bs;
    std::vector<std::vector<long double>> mu(d, std::vector<long double>(d, 0));
    std::vector<long double> norm2(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            long double s = 0;
            for (std::size_t c = 0; c < dim; ++c) s += bs[i][c] * star[j][c];
            mu[i][j] = s / norm2[j];
            for (std::size_t c = 0; c < dim; ++c) star[i][c] -= mu[i][j] * star[j][c];
        }
        long double s = 0;
        for (std::size_t c = 0; c < dim; ++c) s += star[i][c] * star[i][c];
        norm2[i] = s;
    }

    // Nearest-plane rounding of the target, done exactly so that only the
    // residual goes through floating point.
    Row offset(dim, 0);
    Row residual = target;
    {
        std::vector<long double> t(dim);
        for (std::size_t c = 0; c < dim; ++c) t[c] = scaled(residual[c], shift);
        for (std::size_t ii = d; ii-- > 0;) {
            long double s = 0;
            for (std::size_t c = 0; c < dim; ++c) s += t[c] * star[ii][c];
            long double coef = std::nearbyint(s / norm2[ii]);
            if (coef == 0) continue;
            mpz_class q;
            mpz_set_d(q.get_mpz_t(), static_cast<double>(coef));
            for (std::size_t c = 0; c < dim; ++c) {
                offset[c] += q * reduced[ii][c];
                residual[c] -= q * reduced[ii][c];
                t[c] -= coef * bs[ii][c];
            }
        }
    }
    std::vector<long double> tau(d);
    {
        std::vector<long double> t(dim);
        for (std::size_t c = 0; c < dim; ++c) t[c] = scaled(residual[c], shift);
        for (std::size_t i = 0; i < d; ++i) {
            long double s = 0;
            for (std::size_t c = 0; c < dim; ++c) s += t[c] * star[i][c];
            tau[i] = s / norm2[i];
        }
    }

    long double r = scaled(radius, shift);
    long double r2 = r * r * (1.0L + 1e-9L) + 1e-18L;
    std::vector<long long> z(d, 0);
    std::vector<Row> out;

    std::function<void(std::size_t, long double)> level = [&](std::size_t j1, long double partial) {
        std::size_t j = j1 - 1;
        long double c = tau[j];
        for (std::size_t i = j + 1; i < d; ++i) c -= mu[i][j] * static_cast<long double>(z[i]);
        long double rem = r2 - partial;
        if (rem < 0) return;
        long double half = std::sqrt(rem / norm2[j]);
        long long lo = static_cast<long long>(std::ceil(c - half));
        long long hi = static_cast<long long>(std::floor(c + half));
        for (long long v = lo; v <= hi; ++v) {
            if (++nodes > node_budget) throw BudgetExceeded("lattice enumeration node budget", nodes);
            long double diff = static_cast<long double>(v) - c;
            long double p = partial + diff * diff * norm2[j];
            if (p > r2) continue;
            z[j] = v;
            if (j == 0) {
                Row point = offset;
                for (std::size_t i = 0; i < d; ++i)
                    if (z[i] != 0)
                        for (std::size_t cc = 0; cc < dim; ++cc) point[cc] += mpz_class(static_cast<long>(z[i])) * reduced[i][cc];
                out.push_back(std::move(point));
            } else {
                level(j, p);
            }
        }
        z[j] = 0;
    };
    if (d > 0) level(d, 0);
    return out;
}

}  // namespace dioph::lattice
