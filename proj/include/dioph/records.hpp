#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dioph/linear_system.hpp"
#include "dioph/torus.hpp"

namespace dioph {

/// Record scan of v -> max_k ||form_k(v)|| over sup-norm shells.
///
/// A record at norm Y is the minimum over the shell |v| = Y, taken only when
/// it is certifiably below the previous record. Ties go to the
/// lexicographically smallest stored vector.
struct ScanOptions {
    bool half = true;           // v and -v equivalent; stored vectors are canonical
    bool include_zero = false;  // the zero vector belongs to shell 1
    std::int64_t limit = 1;
    std::int64_t exhaustive_up_to = 1;  // shells above this go through the lattice
    double ladder_ratio = 2.0;
    std::uint64_t budget = 1'000'000'000;  // form evaluations (lattice nodes count too)
};

struct ScanRecord {
    IntVector v;
    std::int64_t norm = 0;
    CertifiedReal value;
    bool guided = false;
};

struct ScanResult {
    std::vector<ScanRecord> records;
    std::uint64_t evaluations = 0;
    bool budget_hit = false;
    std::string budget_message;
    std::int64_t completed_norm = 0;  // every shell up to here was processed
};

using ExactEval = std::function<CertifiedReal(std::span<const std::int64_t>)>;

/// Throws Indeterminate (and subclasses) when a decision needs more precision.
ScanResult scan_records(const FixedForms& forms, const ExactEval& exact, const ScanOptions& options);

}  // namespace dioph
