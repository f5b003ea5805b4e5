#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dioph/best_approx.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

enum class ExponentKind { w_hom, w_hat_hom, w_inhom, w_hat_inhom };

std::string exponent_kind_name(ExponentKind k);

/// Fraction of the ratio indices kept at the tail, with a floor on the count.
struct TailWindow {
    double fraction = 0.5;
    std::size_t minimum = 5;
};

struct ExponentEstimate {
    ExponentKind kind = ExponentKind::w_hom;
    double ratio_limsup_proxy = 0;  // max of the ratios over the window
    double ratio_liminf_proxy = 0;  // min of the ratios over the window
    double regression_slope = 0;
    std::size_t window_begin = 0;  // 1-based record indices i, inclusive
    std::size_t window_end = 0;
    std::int64_t truncation_bound = 0;
    bool flagged = false;  // a near-zero value entered the window

    /// limsup proxy for w-type kinds, liminf proxy for hat kinds.
    double value() const;
};

/// Ratios -log M_i / log Y_i (w) and -log M_i / log Y_{i+1} (w hat).
std::pair<ExponentEstimate, ExponentEstimate> hom_exponents(const BestApproxSeq& seq, TailWindow window = {});

struct InhomItem {
    IntVector x;
    std::int64_t X = 0;  // max(1, |x|)
    CertifiedReal D;
    EngineKind engine = EngineKind::exhaustive;
};

/// Records of X -> min_{|x| <= X} ||Ax + theta||.
struct InhomRecordSeq {
    int n = 0;
    int m = 0;
    RealVector theta;
    std::vector<InhomItem> items;
    std::int64_t exhaustive_up_to = 0;
    std::int64_t x_max = 0;
    bool exclude_zero = false;
    bool partial = false;
    bool near_zero = false;  // some D_k is not certified away from 0 (theta possibly in Gamma)
    std::uint64_t evaluations = 0;

    std::size_t size() const { return items.size(); }
    std::string to_table() const;
};

struct InhomOptions {
    bool exclude_zero = false;
    std::optional<std::int64_t> exhaustive_up_to;
    double ladder_ratio = 2.0;
    std::uint64_t budget = 1'000'000'000;
};

std::int64_t default_inhom_exhaustive_bound(int m);

/// theta = 0 requires options.exclude_zero, and then reproduces the
/// homogeneous records of the transposed orientation.
InhomRecordSeq build_inhom_records(const LinearSystem& sys, std::span<const CertifiedReal> theta, std::int64_t x_max,
                                   const InhomOptions& options = {});

/// Ratios -log D_k / log X_k (w) and -log D_k / log X_{k+1} (w hat).
std::pair<ExponentEstimate, ExponentEstimate> inhom_exponents(const InhomRecordSeq& records, TailWindow window = {});

struct GenericSample {
    std::uint64_t index = 0;
    RealVector theta;
    ExponentEstimate w;
    ExponentEstimate w_hat;
    std::size_t records = 0;
    bool flagged = false;
    bool insufficient = false;  // too few records for an estimate; left out of the medians
};

struct GenericReport {
    ExponentEstimate hom_w;      // w(tA) estimate
    ExponentEstimate hom_w_hat;  // w hat(tA) estimate
    double predicted_w = 0;      // 1 / w hat(tA)
    double predicted_w_hat = 0;  // 1 / w(tA)
    std::vector<GenericSample> samples;
    double median_w = 0;
    double median_w_hat = 0;
    double tolerance = 0.1;
    std::size_t lower_bound_violations = 0;  // samples breaking the lower bounds beyond the tolerance
    std::size_t insufficient_samples = 0;
    std::uint64_t seed = 0;
};

struct GenericOptions {
    double tolerance = 0.1;
    TailWindow window;
    double ladder_ratio = 2.0;
    std::optional<std::int64_t> exhaustive_up_to;       // homogeneous side
    std::optional<std::int64_t> inhom_exhaustive_up_to;  // inhomogeneous side
    std::uint64_t budget = 1'000'000'000;
};

GenericReport generic_theorem_experiment(const LinearSystem& sys, std::size_t theta_samples, std::int64_t x_max,
                                         std::int64_t y_max, std::uint64_t seed, const GenericOptions& options = {});

double median(std::vector<double> values);

}  // namespace dioph
