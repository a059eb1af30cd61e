#pragma once

// Ideal projective measurement on one side of a bipartite state and its
// distant effect on the other side, detector coupling, which-way marking,
// and the proper-vs-improper mixture comparison.

#include <optional>
#include <span>
#include <vector>

#include "erasure_lab/schmidt.hpp"
#include "erasure_lab/state_core.hpp"

namespace erasure_lab {

inline constexpr double kCompletenessTol = 1e-10;

struct MeasurementOutcome {
  std::size_t index = 0;  // position in the measured basis
  double probability = 0.0;
  /// Conditional state of the unmeasured subsystems; empty for zero-probability outcomes.
  std::optional<StateVector> post_state;
};

struct Branch {
  double weight = 0.0;
  StateVector state;
};

/// α|1>|1> + β|2>|2> on a 2 x 2 space.
StateVector mark_which_way(Complex alpha, Complex beta);

/// Measures the `split.first` subsystems in `basis_first` (orthonormal,
/// complete on the support of their reduced state). Outcomes follow basis order.
std::vector<MeasurementOutcome> distant_measure(const StateVector& state, const Bipartition& split,
                                                std::span<const CVector> basis_first);

/// Ensemble Σ_k p_k |post_k><post_k| over the unmeasured subsystems.
DensityOperator outcome_ensemble(std::span<const MeasurementOutcome> outcomes);

std::vector<Branch> branches_from(std::span<const MeasurementOutcome> outcomes);

/// (1 ⊗ U)(|state> ⊗ |detector_init>); `targets` index the combined shape.
StateVector couple_detector(const StateVector& state, const StateVector& detector_init,
                            const UnitaryOperator& u, std::span<const std::size_t> targets);

/// |j>|k> -> |j>|(k + shifts[j]) mod detector_dim> on system ⊗ detector.
UnitaryOperator controlled_shift_unitary(std::size_t system_dim, std::size_t detector_dim,
                                         std::span<const std::size_t> shifts);

/// Ideal which-way marking |j>|0> -> |j>|j+1> with a (d+1)-level register.
UnitaryOperator marking_unitary(std::size_t system_dim);

/// Same action as controlled_shift_unitary applied to (control, target) of a
/// larger state, done as an index permutation without forming the matrix.
StateVector apply_controlled_shift(const StateVector& state, std::size_t control, std::size_t target,
                                   std::span<const std::size_t> shifts);

struct CutReport {
  double distance = 0.0;    // trace distance, improper vs proper
  double total_weight = 0.0;
  bool complete = false;    // branch weights sum to 1 within kCompletenessTol
};

/// Compares the improper reduced state of `global` on `keep` with the proper
/// mixture of the branch states reduced to `branch_keep` (weights renormalized).
CutReport cut_compare(const StateVector& global, std::span<const std::size_t> keep,
                      std::span<const Branch> branches, std::span<const std::size_t> branch_keep);

/// Simple erasure with both detectors inside the described object: D_I (3
/// levels, |0> untriggered) records the |±> outcome of particle I, then
/// `first_side` acts on (D_I, I) and `second_side` on (II, D_II). Compares the
/// improper ρ_II of the four-partite state with the proper mixture obtained
/// by reading the D_I pointer.
CutReport simple_erasure_cut(const UnitaryOperator& first_side, const UnitaryOperator& second_side);

}  // namespace erasure_lab
