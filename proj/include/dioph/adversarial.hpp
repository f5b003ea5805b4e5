#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dioph/best_approx.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

/// Increasing indices phi(1) = 1 < phi(2) < ... into a best approximation
/// sequence with, for i >= 2,
///   Y_phi(i) >= (9n)^(1/2) Y_phi(i-1)   and   Y_phi(i-1)+1 >= Y_phi(i) / (9n).
struct PhiSubsequence {
    int n = 1;
    std::vector<std::size_t> phi;  // 1-based
    std::vector<std::int64_t> Y;   // Y of the whole source sequence
    std::vector<IntVector> y;      // y_phi(i)
    double factor = 3;             // (9n)^(1/2)

    std::size_t size() const { return phi.size(); }
};

struct PhiCheck {
    bool growth = true;  // first inequality at every i >= 2
    bool gap = true;     // second inequality at every i >= 2
    std::optional<std::size_t> first_failure;  // 1-based i
    bool pass() const { return growth && gap; }
};

PhiCheck verify_phi(const std::vector<std::int64_t>& Y, const std::vector<std::size_t>& phi, int n);

/// Longest admissible chain from index 1 (dynamic programming over the
/// allowed transitions), verified afterwards. TooShort below 3 indices.
PhiSubsequence extract_phi(const BestApproxSeq& seq, int n);
/// Same on bare data, for synthetic norm sequences.
PhiSubsequence extract_phi(const std::vector<std::int64_t>& Y, const std::vector<IntVector>& y, int n);

struct DyadicBox {
    std::vector<mpq_class> lo;
    std::vector<mpq_class> hi;
};

struct PhiCertificateRow {
    std::size_t i = 0;  // position in phi, 1-based
    std::size_t phi = 0;
    IntVector y;
    CertifiedReal distance;  // ||y . theta||, recomputed at doubled precision
};

struct AdversarialTarget {
    int n = 1;
    std::vector<mpq_class> theta_exact;  // dyadic
    RealVector theta;
    std::vector<DyadicBox> box_chain;  // [0,1]^n first, then one box per index
    std::vector<PhiCertificateRow> certificate;
    mpq_class final_width;  // largest side of the last box

    std::size_t certified_indices() const { return certificate.size(); }
    /// An uncertified target for control runs.
    static AdversarialTarget uncertified(const RealVector& theta);
    std::string to_text() const;
};

/// Nested dyadic boxes on which ||y_phi(i) . theta|| >= 1/4 throughout,
/// searched depth-first with backtracking; theta is the centre of the last
/// box. NoQualifyingBox carries the 1-based index that could not be met.
AdversarialTarget build_theta(const PhiSubsequence& phi, int prec = 128, std::uint64_t node_budget = 1'000'000);

/// Re-evaluates ||y_phi(i) . theta|| >= 1/4 at the given precision.
bool recheck_target(const AdversarialTarget& target, int prec);

/// 1 / (72 n^2 (8m)^(m/n)).
double prop1_constant(int n, int m);

struct Prop1Report {
    double constant = 0;
    std::int64_t x_bound = 0;
    bool target_certified = false;
    std::size_t violations = 0;
    std::optional<IntVector> first_violation;
    double min_slack = 0;  // min over x of ||Ax + theta|| |x|^(m/n) / C
    std::uint64_t evaluations = 0;

    bool holds() const { return violations == 0; }
    /// "holds", "violated" or "violated (target not adversarial)".
    std::string verdict() const;
};

Prop1Report verify_prop1_bound(const LinearSystem& sys, const AdversarialTarget& target, std::int64_t x_bound,
                               std::uint64_t budget = 1'000'000'000);

struct SoftSample {
    RealVector theta;
    std::int64_t largest_violation = 0;  // largest |x| in [x_min, x_bound] with ||Ax+theta|| < |x|^-w; 0 if none
    std::size_t violations = 0;
};

struct SoftTargetReport {
    double w = 0;
    std::int64_t x_min = 1;
    std::int64_t x_bound = 0;
    std::vector<SoftSample> samples;
    std::uint64_t seed = 0;

    double success_rate() const;
};

/// ||Ax + theta|| >= |x|^-w checked for x_min <= |x| <= x_bound on given targets.
SoftTargetReport prop1_soft_check(const LinearSystem& sys, double w, const std::vector<RealVector>& thetas,
                                  std::int64_t x_min, std::int64_t x_bound);

/// Seeded uniform targets. Requires w > 1 / w_hat_tA_estimate.
SoftTargetReport prop1_soft_target(const LinearSystem& sys, double w, double w_hat_tA_estimate, std::int64_t x_min,
                                   std::int64_t x_bound, std::size_t samples, std::uint64_t seed);

}  // namespace dioph
