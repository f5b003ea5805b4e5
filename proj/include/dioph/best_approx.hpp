#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dioph/linear_system.hpp"

namespace dioph {

enum class EngineKind { exhaustive, reduction_guided };

std::string engine_name(EngineKind e);

struct ApproxItem {
    IntVector y;
    std::int64_t Y = 0;
    CertifiedReal M;
    EngineKind engine = EngineKind::exhaustive;
};

/// Best approximations (y_i, Y_i, M_i) of the forms M(y) = ||tA y||.
struct BestApproxSeq {
    int n = 0;
    int m = 0;
    std::vector<ApproxItem> items;
    EngineKind engine = EngineKind::exhaustive;
    std::int64_t exhaustive_up_to = 0;
    std::int64_t y_max = 0;
    bool partial = false;  // budget ran out; items are valid up to completed_norm
    std::int64_t completed_norm = 0;
    std::uint64_t evaluations = 0;

    std::size_t size() const { return items.size(); }
    std::vector<std::int64_t> norms() const;
    /// i, Y_i, y_i coordinates, M_i digits, radius, engine flag.
    std::string to_table() const;
};

/// Budget overrun; carries the sequence built so far.
class BudgetExceededWithSequence : public BudgetExceeded {
public:
    BudgetExceededWithSequence(const std::string& what, BestApproxSeq partial)
        : BudgetExceeded(what, partial.evaluations), partial_(std::move(partial)) {}
    const BestApproxSeq& partial() const noexcept { return partial_; }

private:
    BestApproxSeq partial_;
};

struct BuildOptions {
    std::uint64_t budget = 1'000'000'000;
};

/// Shell enumeration up to Y_max; n <= 3.
BestApproxSeq build_sequence_exhaustive(const LinearSystem& sys, std::int64_t y_max,
                                        const BuildOptions& options = {});

/// Largest shell norm the guided engine enumerates in full by default.
std::int64_t default_exhaustive_bound(int n);

/// Exhaustive up to exhaustive_up_to, then lattice candidates on the ladder
/// B -> ladder_ratio * B.
BestApproxSeq build_sequence_guided(const LinearSystem& sys, std::int64_t y_max, double ladder_ratio = 2.0,
                                    std::optional<std::int64_t> exhaustive_up_to = std::nullopt,
                                    const BuildOptions& options = {});

struct SequenceCheck {
    bool applicable = true;
    bool pass = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::optional<std::size_t> first_violation;  // 1-based index i
    double min_margin = 0;
    std::string detail;
};

/// Y_{i + 3^{m+n}} >= 2 Y_{i+1} for all applicable i. Margin: log2 of the ratio minus 1.
SequenceCheck validate_lemma1(const BestApproxSeq& seq, int n, int m);

/// M_i <= Y_{i+1}^{-n/m}. Margin: relative slack 1 - M_i Y_{i+1}^{n/m}.
SequenceCheck validate_dirichlet(const BestApproxSeq& seq, int n, int m);

/// Largest 1-based index i with ||y_i . theta|| < Y_i^{-delta}; 0 when none.
std::size_t lemma2_last_violation(const BestApproxSeq& seq, std::span<const CertifiedReal> theta, double delta);

struct Lemma2Report {
    double delta = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> last_violation;  // per sample
    std::size_t exceptional = 0;              // samples violating at the last index
    std::size_t count_beyond(std::size_t index) const;
};

Lemma2Report lemma2_statistical_check(const BestApproxSeq& seq, double delta, std::size_t theta_samples,
                                      std::uint64_t seed);

/// Sequence invariants: Y_1 = 1, Y increasing, M decreasing (certified).
bool sequence_invariants_hold(const BestApproxSeq& seq);

}  // namespace dioph
