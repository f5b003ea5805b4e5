#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "dioph/linear_system.hpp"

namespace dioph {

/// 2^(1-m-n) ((m+n)!)^2, exact.
mpq_class kappa(int m, int n);

struct HypothesisReport {
    bool holds = true;
    std::optional<IntVector> violating;    // first failing y in shell order
    std::optional<CertifiedReal> value;    // M at the violating y, when enclosable
    std::int64_t checked_to = 0;           // floor(Y)
    CertifiedReal threshold;               // kappa / X
    std::size_t boundary_cases = 0;        // enclosures overlapping the threshold, accepted
    std::uint64_t evaluations = 0;
};

/// Certifies M(y) >= kappa / X for every 0 < |y| <= Y.
HypothesisReport check_hypothesis(const LinearSystem& sys, double X, double Y,
                                  std::uint64_t budget = 1'000'000'000);

/// min of M(y) over 0 < |y| <= Y, as an enclosure. Y >= 1.
CertifiedReal min_M_up_to(const LinearSystem& sys, std::int64_t Y, std::uint64_t budget = 1'000'000'000);

struct TransferenceCertificate {
    double X = 0;
    double Y = 0;
    mpq_class kappa;
    std::int64_t hypothesis_checked_to = 0;
    IntVector solution_x;
    CertifiedReal achieved;  // ||A x + theta||
    CertifiedReal bound;     // kappa / Y
    std::uint64_t evaluations = 0;

    std::string to_text() const;
};

/// Lexicographically smallest x with |x| <= X and ||Ax + theta|| <= kappa / Y.
/// Checks the hypothesis first (InvalidArgument if it fails). SearchExhausted
/// means the search found nothing, which the hypothesis rules out.
TransferenceCertificate lemma3_solve(const LinearSystem& sys, std::span<const CertifiedReal> theta, double X,
                                     double Y, std::uint64_t budget = 1'000'000'000);

/// Recomputes ||Ax + theta|| from the entries at doubled precision and checks
/// |x| <= X and the bound.
bool verify_certificate(const TransferenceCertificate& cert, const LinearSystem& sys,
                        std::span<const CertifiedReal> theta);

struct KhintchineAudit {
    int n = 0;
    int m = 0;
    double tol = 0;
    double w_rhs = 0;
    double w_margin = 0;  // w(A) - rhs
    double hat_rhs = 0;
    double hat_margin = 0;
    bool w_pass = false;
    bool hat_pass = false;

    bool pass() const { return w_pass && hat_pass; }
};

/// Plugs estimates for an n x m matrix A into
/// w(A) >= (m w(tA) + m - 1) / ((n - 1) w(tA) + n), and the same for the
/// uniform exponents. Each passes when its margin is >= -tol.
KhintchineAudit khintchine_audit(int n, int m, double w_A, double w_tA, double w_hat_A, double w_hat_tA,
                                 double tol);

}  // namespace dioph
