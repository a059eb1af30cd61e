#pragma once

// Canonical Schmidt decomposition of bipartite pure states, the EPR-type
// (degenerate spectrum) test, the antiunitary correlation operator, and
// re-expansion of a degenerate state in another first-subsystem basis.

#include <span>
#include <vector>

#include "erasure_lab/state_core.hpp"

namespace erasure_lab {

inline constexpr double kRankTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-8;
inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kReconstructTol = 1e-9;
inline constexpr double kEigenResidualTol = 1e-8;

/// Splits the subsystems of a shape into `first` (in the listed order) and
/// the ascending complement.
struct Bipartition {
  std::vector<std::size_t> first;

  std::vector<std::size_t> second(const HilbertShape& shape) const { return shape.complement(first); }
  void validate(const HilbertShape& shape) const;
};

/// Σ_k c_k |u_k> ⊗ |v_k> with c_k > 0, {u_k} and {v_k} orthonormal.
class SchmidtDecomposition {
 public:
  SchmidtDecomposition(HilbertShape shape, Bipartition split, std::vector<double> coefficients,
                       std::vector<CVector> basis_first, std::vector<CVector> basis_second);

  const HilbertShape& shape() const noexcept { return shape_; }
  const Bipartition& split() const noexcept { return split_; }
  std::size_t rank() const noexcept { return coefficients_.size(); }

  /// c_k = r_k^{1/2}
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  /// r_k = c_k², the nonzero spectrum of both reduced states.
  std::vector<double> weights() const;
  const std::vector<CVector>& basis_first() const noexcept { return basis_first_; }
  const std::vector<CVector>& basis_second() const noexcept { return basis_second_; }

  /// The bipartite state the decomposition describes, in the shape's order.
  StateVector reconstruct() const;

 private:
  HilbertShape shape_;
  Bipartition split_;
  std::vector<double> coefficients_;
  std::vector<CVector> basis_first_;
  std::vector<CVector> basis_second_;
};

/// Coefficients come out descending. Each first-side vector has its first
/// component of modulus above kRankTol made real-positive, with the inverse
/// phase moved onto its partner.
SchmidtDecomposition schmidt_decompose(const StateVector& state, const Bipartition& split);

/// True when two positive weights r_j, r_k (j != k) agree within `degeneracy_tol`.
bool is_epr_type(const SchmidtDecomposition& dec, double degeneracy_tol = kDegeneracyTol);

/// U_a = V ∘ K, where K conjugates components and V is an isometry from the
/// conjugated support of the first reduced state onto the second one.
class CorrelationOperator {
 public:
  CorrelationOperator(CMatrix isometry, std::vector<CVector> domain_basis);

  const CMatrix& isometry() const noexcept { return isometry_; }
  const std::vector<CVector>& domain_basis() const noexcept { return domain_basis_; }

  /// Antilinear: apply(α v) = conj(α) apply(v).
  CVector apply(const CVector& v) const;

 private:
  CMatrix isometry_;
  std::vector<CVector> domain_basis_;
};

CorrelationOperator correlation_operator(const SchmidtDecomposition& dec);

/// Re-expands `state` with `new_basis_first` as the first-side Schmidt basis.
/// Partners are obtained by contraction, (<e| ⊗ 1)|state> normalized.
/// Throws ContractError unless every new vector is an eigenvector of the first
/// reduced state with positive eigenvalue and the vectors span its support;
/// otherwise the expansion would not be biorthogonal.
SchmidtDecomposition reschmidt(const StateVector& state, const Bipartition& split,
                               std::span<const CVector> new_basis_first);

/// Max deviation of the Gram matrix of `vectors` from the identity.
double orthonormality_error(std::span<const CVector> vectors);

}  // namespace erasure_lab
