#include "dioph/rng.hpp"

namespace dioph {

CertifiedReal uniform_dyadic(std::uint64_t seed, std::uint64_t stream, int bits, int prec) {
    mpz_class numerator = 0;
    int words = (bits + 63) / 64;
    for (int w = 0; w < words; ++w) {
        numerator <<= 64;
        std::uint64_t word = counter_word(seed, stream, static_cast<std::uint64_t>(w));
        numerator += mpz_class(static_cast<unsigned long>(word));
    }
    int excess = words * 64 - bits;
    numerator >>= excess;
    return CertifiedReal::from_dyadic(numerator, bits, std::max(prec, bits));
}

}  // namespace dioph
