#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dioph/linear_system.hpp"
#include "dioph/precision.hpp"

namespace dioph {

/// First `length` letters of the fixed point of a -> ab, b -> a.
template <class Symbol>
std::vector<Symbol> expand_fibonacci_word(Symbol a, Symbol b, std::size_t length) {
    if (length == 0) throw InvalidArgument("expand_fibonacci_word: length must be >= 1");
    std::vector<Symbol> word{a};
    while (word.size() < length) {
        std::vector<Symbol> next;
        next.reserve(word.size() * 2);
        for (const Symbol& s : word) {
            next.push_back(a);
            if (s == a) next.push_back(b);
        }
        word = std::move(next);
    }
    word.resize(length);
    return word;
}

/// Characteristic Sturmian word over {a, b} whose directive sequence is the
/// continued fraction [0; d1, d2, ...] of the slope: s_{-1} = b, s_0 = a,
/// s_k = s_{k-1}^{d_k} s_{k-2}. The directive list is cycled when exhausted.
/// With all d_k = 1 this is the Fibonacci word.
template <class Symbol>
std::vector<Symbol> expand_sturmian_word(Symbol a, Symbol b, const std::vector<std::int64_t>& directive,
                                         std::size_t length) {
    if (length == 0) throw InvalidArgument("expand_sturmian_word: length must be >= 1");
    if (directive.empty()) throw InvalidArgument("expand_sturmian_word: empty directive sequence");
    for (auto d : directive)
        if (d < 1) throw InvalidArgument("expand_sturmian_word: directive quotients must be >= 1");
    std::vector<Symbol> prev{b}, cur{a};
    for (std::size_t k = 0; cur.size() < length; ++k) {
        std::vector<Symbol> next;
        auto reps = directive[k % directive.size()];
        for (std::int64_t r = 0; r < reps; ++r) next.insert(next.end(), cur.begin(), cur.end());
        next.insert(next.end(), prev.begin(), prev.end());
        prev = std::move(cur);
        cur = std::move(next);
    }
    cur.resize(length);
    return cur;
}

enum class CFRule { explicit_list, fibonacci, sturmian, periodic };

/// Data defining xi = [0; q1, q2, ...].
///
/// An explicit list denotes the finite continued fraction itself (a rational).
/// The other rules generate an infinite expansion; `length` quotients are used
/// and `length == 0` means "as many as the precision target needs".
struct CFSpec {
    CFRule rule = CFRule::explicit_list;
    std::vector<std::int64_t> partial_quotients;  // explicit list or period
    std::int64_t a = 1;
    std::int64_t b = 2;
    std::vector<std::int64_t> angle;  // sturmian directive sequence
    std::size_t length = 0;

    static CFSpec explicit_list(std::vector<std::int64_t> quotients);
    static CFSpec fibonacci(std::int64_t a, std::int64_t b, std::size_t length = 0);
    static CFSpec sturmian(std::int64_t a, std::int64_t b, std::vector<std::int64_t> angle,
                           std::size_t length = 0);
    static CFSpec periodic(std::vector<std::int64_t> period, std::size_t length = 0);

    void validate() const;
    bool is_infinite() const { return rule != CFRule::explicit_list; }
    /// First `count` partial quotients.
    std::vector<std::int64_t> quotients(std::size_t count) const;
    std::string describe() const;
};

struct Convergent {
    mpz_class p;
    mpz_class q;
};

/// Convergents p_k/q_k of [0; q1..qN], k = 1..N.
std::vector<Convergent> convergents(const std::vector<std::int64_t>& quotients);

/// xi with a certified radius from the convergent sandwich.
CertifiedReal cf_to_real(const CFSpec& spec, const PrecisionContext& ctx);

/// sqrt(d) for a positive integer d.
CertifiedReal sqrt_of(std::int64_t d, const PrecisionContext& ctx);
/// (1 + sqrt 5) / 2.
CertifiedReal golden_ratio(const PrecisionContext& ctx);

enum class Orientation { row, column };

/// (xi, ..., xi^deg) as a 1 x deg row or deg x 1 column.
LinearSystem power_matrix(const CertifiedReal& xi, int deg, Orientation orientation,
                          Provenance provenance = {});

/// sum_{k=1..terms} base^-k!, with radius covering the tail (<= 2 base^-(terms+1)!).
CertifiedReal liouville_number(std::int64_t base, int terms, const PrecisionContext& ctx);

/// Entries i.i.d. uniform on [0, 1), exact dyadics with mantissa_bits random bits.
LinearSystem random_matrix(std::uint64_t seed, int n, int m, const PrecisionContext& ctx);

/// 1 x 1 system (xi).
LinearSystem scalar_system(const CertifiedReal& xi, Provenance provenance = {});

}  // namespace dioph
