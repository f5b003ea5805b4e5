#include "dioph/number_factory.hpp"

#include <cmath>
#include <sstream>

#include "dioph/rng.hpp"

namespace dioph {

CFSpec CFSpec::explicit_list(std::vector<std::int64_t> quotients) {
    CFSpec s;
    s.rule = CFRule::explicit_list;
    s.partial_quotients = std::move(quotients);
    s.length = s.partial_quotients.size();
    return s;
}

CFSpec CFSpec::fibonacci(std::int64_t a, std::int64_t b, std::size_t length) {
    CFSpec s;
    s.rule = CFRule::fibonacci;
    s.a = a;
    s.b = b;
    s.length = length;
    return s;
}

CFSpec CFSpec::sturmian(std::int64_t a, std::int64_t b, std::vector<std::int64_t> angle, std::size_t length) {
    CFSpec s;
    s.rule = CFRule::sturmian;
    s.a = a;
    s.b = b;
    s.angle = std::move(angle);
    s.length = length;
    return s;
}

CFSpec CFSpec::periodic(std::vector<std::int64_t> period, std::size_t length) {
    CFSpec s;
    s.rule = CFRule::periodic;
    s.partial_quotients = std::move(period);
    s.length = length;
    return s;
}

void CFSpec::validate() const {
    auto positive = [](const std::vector<std::int64_t>& v) {
        for (auto q : v)
            if (q < 1) throw InvalidArgument("partial quotients must be >= 1");
    };
    switch (rule) {
        case CFRule::explicit_list:
        case CFRule::periodic:
            if (partial_quotients.empty()) throw InvalidArgument("CFSpec: empty quotient list");
            positive(partial_quotients);
            break;
        case CFRule::sturmian:
            if (angle.empty()) throw InvalidArgument("CFSpec: sturmian rule needs an angle expansion");
            positive(angle);
            [[fallthrough]];
        case CFRule::fibonacci:
            if (a < 1 || b < 1) throw InvalidArgument("partial quotients must be >= 1");
            if (a == b) throw InvalidArgument("CFSpec: a and b must differ");
            break;
    }
}

std::vector<std::int64_t> CFSpec::quotients(std::size_t count) const {
    validate();
    switch (rule) {
        case CFRule::explicit_list: {
            std::vector<std::int64_t> q = partial_quotients;
            if (count < q.size()) q.resize(count);
            return q;
        }
        case CFRule::periodic: {
            std::vector<std::int64_t> q(count);
            for (std::size_t i = 0; i < count; ++i) q[i] = partial_quotients[i % partial_quotients.size()];
            return q;
        }
        case CFRule::fibonacci:
            return count == 0 ? std::vector<std::int64_t>{} : expand_fibonacci_word(a, b, count);
        case CFRule::sturmian:
            return count == 0 ? std::vector<std::int64_t>{} : expand_sturmian_word(a, b, angle, count);
    }
    return {};
}

std::string CFSpec::describe() const {
    std::ostringstream out;
    auto list = [&](const std::vector<std::int64_t>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
    };
    switch (rule) {
        case CFRule::explicit_list:
            out << "explicit(";
            list(partial_quotients);
            out << ")";
            break;
        case CFRule::periodic:
            out << "periodic(";
            list(partial_quotients);
            out << ")";
            break;
        case CFRule::fibonacci:
            out << "fibonacci(" << a << ',' << b << ")";
            break;
        case CFRule::sturmian:
            out << "sturmian(" << a << ',' << b << ',';
            list(angle);
            out << ")";
            break;
    }
    return out.str();
}

std::vector<Convergent> convergents(const std::vector<std::int64_t>& quotients) {
    std::vector<Convergent> out;
    out.reserve(quotients.size());
    // [0; q1, q2, ...]: p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1.
    mpz_class p_prev = 1, q_prev = 0, p = 0, q = 1;
    for (auto a : quotients) {
        mpz_class pn = a * p + p_prev;
        mpz_class qn = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        out.push_back({p, q});
    }
    return out;
}

namespace {

CertifiedReal enclose_rationals(const mpq_class& x, const mpq_class& y, int prec) {
    const mpq_class& lo = x < y ? x : y;
    const mpq_class& hi = x < y ? y : x;
    BigFloat l(prec), h(prec);
    mpfr_set_q(l.get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(h.get(), hi.get_mpq_t(), MPFR_RNDU);
    return CertifiedReal::from_interval(l, h, prec);
}

bool radius_within(const CertifiedReal& x, int exponent) {
    BigFloat target(64);
    mpfr_set_ui_2exp(target.get(), 1, exponent, MPFR_RNDN);
    return mpfr_lessequal_p(x.radius().get(), target.get());
}

}  // namespace

CertifiedReal cf_to_real(const CFSpec& spec, const PrecisionContext& ctx) {
    ctx.validate();
    spec.validate();
    int prec = ctx.mantissa_bits;
    if (!spec.is_infinite()) {
        auto conv = convergents(spec.partial_quotients);
        return CertifiedReal::from_mpq(mpq_class(conv.back().p, conv.back().q), prec);
    }

    auto sandwich = [&](std::size_t count) {
        auto conv = convergents(spec.quotients(count));
        const Convergent& last = conv.back();
        mpz_class p_prev = count >= 2 ? conv[count - 2].p : mpz_class(0);
        mpz_class q_prev = count >= 2 ? conv[count - 2].q : mpz_class(1);
        // The tail t = [q_{N+1}; ...] lies in [1, inf): xi sits between
        // p_N/q_N (t -> inf) and (p_N + p_{N-1})/(q_N + q_{N-1}) (t = 1).
        mpq_class end1(last.p, last.q);
        mpq_class end2(last.p + p_prev, last.q + q_prev);
        end1.canonicalize();
        end2.canonicalize();
        return enclose_rationals(end1, end2, prec);
    };

    if (spec.length > 0) {
        CertifiedReal x = sandwich(spec.length);
        if (!radius_within(x, ctx.radius_exponent()))
            throw InsufficientQuotients("cf_to_real: " + std::to_string(spec.length) +
                                        " quotients leave radius " + x.radius().to_string(3));
        return x;
    }
    // Each quotient at least multiplies q_N by the golden ratio, so this
    // count always suffices; the loop only trims it.
    std::size_t count = 8;
    for (; count < 1'000'000; count += count / 2) {
        CertifiedReal x = sandwich(count);
        if (radius_within(x, ctx.radius_exponent() - 1)) return x;
    }
    throw InsufficientQuotients("cf_to_real: radius target unreachable");
}

CertifiedReal sqrt_of(std::int64_t d, const PrecisionContext& ctx) {
    if (d < 1) throw InvalidArgument("sqrt_of: d must be positive");
    return CertifiedReal::from_int(d, ctx.mantissa_bits).sqrt();
}

CertifiedReal golden_ratio(const PrecisionContext& ctx) {
    return (CertifiedReal::from_int(1, ctx.mantissa_bits) + sqrt_of(5, ctx)).mul_2exp(-1);
}

LinearSystem power_matrix(const CertifiedReal& xi, int deg, Orientation orientation, Provenance provenance) {
    if (deg < 1) throw InvalidArgument("power_matrix: deg must be >= 1");
    RealVector powers;
    CertifiedReal p = xi;
    for (int k = 0; k < deg; ++k) {
        powers.push_back(p);
        p = p * xi;
    }
    if (provenance.generator.empty()) provenance.generator = "power";
    provenance.params.emplace_back("degree", std::to_string(deg));
    provenance.params.emplace_back("orientation", orientation == Orientation::row ? "row" : "column");
    if (orientation == Orientation::row) return LinearSystem(1, deg, std::move(powers), std::move(provenance));
    return LinearSystem(deg, 1, std::move(powers), std::move(provenance));
}

CertifiedReal liouville_number(std::int64_t base, int terms, const PrecisionContext& ctx) {
    if (base < 2) throw InvalidArgument("liouville_number: base must be >= 2");
    if (terms < 1) throw InvalidArgument("liouville_number: terms must be >= 1");
    ctx.validate();
    // Exponent of the tail bound, in bits: (terms+1)! log2(base).
    double fact = 1;
    for (int k = 2; k <= terms + 1; ++k) fact *= k;
    double tail_bits = fact * std::log2(static_cast<double>(base));
    if (tail_bits > static_cast<double>(-mpfr_get_emin()) - 64 || fact > 9.0e15)
        throw PrecisionOverflow("liouville_number: tail bound not representable");

    int prec = ctx.mantissa_bits;
    CertifiedReal sum = CertifiedReal::from_int(0, prec);
    long k_fact = 1;
    BigFloat b(64);
    mpfr_set_si(b.get(), static_cast<long>(base), MPFR_RNDN);
    for (int k = 1; k <= terms; ++k) {
        k_fact *= k;
        BigFloat lo(prec), hi(prec);
        mpfr_pow_si(lo.get(), b.get(), -k_fact, MPFR_RNDD);
        mpfr_pow_si(hi.get(), b.get(), -k_fact, MPFR_RNDU);
        sum = sum + CertifiedReal::from_interval(lo, hi, prec);
    }
    long next_fact = k_fact * (terms + 1);
    BigFloat tail(CertifiedReal::kRadiusPrecision);
    mpfr_pow_si(tail.get(), b.get(), -next_fact, MPFR_RNDU);
    mpfr_mul_2ui(tail.get(), tail.get(), 1, MPFR_RNDU);
    BigFloat radius(CertifiedReal::kRadiusPrecision);
    mpfr_add(radius.get(), sum.radius().get(), tail.get(), MPFR_RNDU);
    return CertifiedReal::from_ball(sum.center(), radius);
}

LinearSystem random_matrix(std::uint64_t seed, int n, int m, const PrecisionContext& ctx) {
    ctx.validate();
    if (n < 1 || m < 1) throw InvalidArgument("random_matrix: dimensions must be positive");
    RealVector entries;
    for (int k = 0; k < n * m; ++k)
        entries.push_back(uniform_dyadic(seed, static_cast<std::uint64_t>(k), ctx.mantissa_bits, ctx.mantissa_bits));
    Provenance p{"random", {{"seed", std::to_string(seed)}, {"n", std::to_string(n)}, {"m", std::to_string(m)}}};
    return LinearSystem(n, m, std::move(entries), std::move(p));
}

LinearSystem scalar_system(const CertifiedReal& xi, Provenance provenance) {
    if (provenance.generator.empty()) provenance.generator = "scalar";
    return LinearSystem(1, 1, RealVector{xi}, std::move(provenance));
}

}  // namespace dioph
