#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dioph/precision.hpp"
#include "dioph/torus.hpp"

namespace dioph {

using IntVector = std::vector<std::int64_t>;
using RealVector = std::vector<CertifiedReal>;

/// Generator name and parameters, enough to rebuild a system.
struct Provenance {
    std::string generator;
    std::vector<std::pair<std::string, std::string>> params;

    std::string to_text() const;
};

/// A real n x m matrix A = (alpha_ij).
///
/// Rows give the forms L_i(x) = sum_j alpha_ij x_j on Z^m; columns give the
/// forms M_j(y) = sum_i alpha_ij y_i on Z^n. All entries share one precision.
class LinearSystem {
public:
    LinearSystem(int n, int m, RealVector entries, Provenance provenance);

    int n() const { return n_; }
    int m() const { return m_; }
    int precision() const { return precision_; }
    const CertifiedReal& entry(int i, int j) const {
        return entries_[static_cast<std::size_t>(i * m_ + j)];
    }
    const Provenance& provenance() const { return provenance_; }

    LinearSystem transpose() const;

    /// Fixed-point forms M_1..M_m in the variables y (vars = n, forms = m).
    FixedForms column_forms() const;
    /// Fixed-point forms L_i(x) + theta_i (vars = m, forms = n).
    FixedForms row_forms(std::span<const CertifiedReal> theta) const;

    /// Text record: dimensions, entry digits and provenance.
    std::string to_text() const;

private:
    int n_;
    int m_;
    int precision_;
    RealVector entries_;
    Provenance provenance_;
};

/// Two sides of || y . theta || <= n|y| max_i ||L_i(x) + theta_i|| + m|x| M(y).
struct DualityWitness {
    IntVector x;
    IntVector y;
    CertifiedReal lhs;
    CertifiedReal rhs;

    /// lhs <= rhs up to the combined radii.
    bool holds() const;
};

struct DegeneracyReport {
    std::int64_t height_bound = 0;
    std::optional<IntVector> relation;
    std::optional<CertifiedReal> value;
    /// Threshold 2^-(mantissa_bits / 2) used for "certified below".
    int threshold_exponent = 0;
};

std::int64_t sup_norm(std::span<const std::int64_t> v);
/// Flip the sign so that the first nonzero coordinate is positive.
IntVector canonical(IntVector v);

/// M(y) = max_j || M_j(y) ||. Zero y is allowed and gives 0.
/// Throws ZeroNotExcluded if y != 0 and the enclosure contains 0.
CertifiedReal eval_M(const LinearSystem& sys, std::span<const std::int64_t> y);

/// || A x + theta || = max_i || L_i(x) + theta_i ||.
CertifiedReal eval_L_inhom(const LinearSystem& sys, std::span<const std::int64_t> x,
                           std::span<const CertifiedReal> theta);

DualityWitness duality_check(const LinearSystem& sys, std::span<const std::int64_t> x,
                             std::span<const std::int64_t> y, std::span<const CertifiedReal> theta);

/// Searches 0 < |y| <= height_bound for M(y) certified below 2^-(mantissa_bits/2).
DegeneracyReport degeneracy_probe(const LinearSystem& sys, std::int64_t height_bound,
                                  const PrecisionContext& ctx);

/// Rejects theta vectors of the wrong length or of a foreign inexact precision.
void validate_theta(const LinearSystem& sys, std::span<const CertifiedReal> theta);

RealVector zero_theta(int n, int prec);

}  // namespace dioph
