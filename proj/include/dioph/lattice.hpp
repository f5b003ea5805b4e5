#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace dioph::lattice {

using Row = std::vector<mpz_class>;
using Basis = std::vector<Row>;  // one basis vector per row

/// In-place LLL reduction with exact integer arithmetic (Lovasz parameter
/// delta). The rows must be linearly independent.
void lll_reduce(Basis& basis, const mpq_class& delta = mpq_class(99, 100));

/// Every lattice vector v with ||v - target||_2 <= radius, plus possibly a few
/// just outside (floating-point pruning uses a small relative margin; callers
/// filter exactly). `node_budget` caps the enumeration tree; the number of
/// nodes visited is added to `nodes`.
std::vector<Row> enumerate_near(const Basis& reduced, const Row& target, const mpz_class& radius,
                                std::uint64_t node_budget, std::uint64_t& nodes);

}  // namespace dioph::lattice
