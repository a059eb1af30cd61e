#pragma once

// Coherence bases of a two-dimensional subsystem and their behavior under
// the two-particle exchange operator.

#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

#include "erasure_lab/schmidt.hpp"
#include "erasure_lab/state_core.hpp"

namespace erasure_lab {

inline constexpr double kSymmetryTol = 1e-9;

/// |a> = e^{iλ} p|1> + e^{iδ} q|2>,  |b> = e^{iγ} q|1> + e^{i(γ+δ−λ+π)} p|2>.
struct CoherenceBasisParams {
  double p = std::numbers::sqrt2 / 2;
  double q = std::numbers::sqrt2 / 2;
  double lambda = 0.0;
  double delta = 0.0;
  double gamma = 0.0;

  /// p = q = (1/2)^{1/2}.
  static CoherenceBasisParams balanced(double lambda, double delta, double gamma = 0.0);
  void validate() const;
};

enum class SymmetryClass { TermwiseSymmetric, TermSwapping, Neither };

std::string_view to_string(SymmetryClass c);

std::pair<StateVector, StateVector> coherence_pair(const CoherenceBasisParams& params);

/// |j>|k> -> |k>|j> on a d x d space.
UnitaryOperator exchange_operator(std::size_t d);

/// Classifies a rank-2 decomposition on a 2 x 2 space by comparing factors:
/// TermwiseSymmetric when every term has identical first and second factors
/// (exchange fixes each term), TermSwapping when the factors of term 1 are
/// those of term 2 in reverse (exchange maps one term onto the other).
SymmetryClass classify_symmetry(const SchmidtDecomposition& dec);

struct BasisSearchHit {
  CoherenceBasisParams params;
  SymmetryClass symmetry;
};

/// Scans λ, δ over {2πk/grid_steps} with γ = 0, re-expands the maximally
/// entangled two-qubit state in each coherence basis and keeps the points
/// that are not SymmetryClass::Neither. Ordered by (λ index, δ index).
std::vector<BasisSearchHit> search_symmetric_bases(std::size_t grid_steps,
                                                   double p = std::numbers::sqrt2 / 2);

/// (1/2)^{1/2}(|1>|1> + |2>|2>)
StateVector maximally_entangled_pair();

}  // namespace erasure_lab
