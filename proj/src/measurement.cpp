#include "erasure_lab/measurement.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace erasure_lab {

StateVector mark_which_way(Complex alpha, Complex beta) {
  if (alpha == 0.0 || beta == 0.0) {
    throw ContractError("mark_which_way: both coefficients must be nonzero");
  }
  CVector amps = CVector::Zero(4);
  amps(0) = alpha;
  amps(3) = beta;
  return StateVector(HilbertShape({2, 2}), std::move(amps));
}

std::vector<MeasurementOutcome> distant_measure(const StateVector& state, const Bipartition& split,
                                                std::span<const CVector> basis_first) {
  split.validate(state.shape());
  const CMatrix m = coefficient_matrix(state.amplitudes(), state.shape(), split.first);
  for (const auto& e : basis_first) {
    if (e.size() != m.rows()) throw ContractError("distant_measure: basis vector dimension mismatch");
  }
  if (orthonormality_error(basis_first) > kOrthonormalTol) {
    throw ContractError("distant_measure: measurement basis is not orthonormal");
  }
  const HilbertShape rest = state.shape().select(split.second(state.shape()));

  std::vector<MeasurementOutcome> outcomes;
  double total = 0.0;
  for (std::size_t k = 0; k < basis_first.size(); ++k) {
    CVector projected = m.transpose() * basis_first[k].conjugate();
    const double norm = projected.norm();
    MeasurementOutcome outcome{k, norm * norm, std::nullopt};
    if (norm > kRankTol) outcome.post_state = StateVector(rest, projected / norm);
    total += outcome.probability;
    outcomes.push_back(std::move(outcome));
  }
  if (total < 1.0 - kCompletenessTol) {
    throw ContractError("distant_measure: basis is incomplete on the measured support (total "
                        "probability " + std::to_string(total) + ")");
  }
  return outcomes;
}

DensityOperator outcome_ensemble(std::span<const MeasurementOutcome> outcomes) {
  std::vector<double> weights;
  std::vector<StateVector> states;
  for (const auto& o : outcomes) {
    if (!o.post_state) continue;
    weights.push_back(o.probability);
    states.push_back(*o.post_state);
  }
  return DensityOperator::mixture(weights, states);
}

std::vector<Branch> branches_from(std::span<const MeasurementOutcome> outcomes) {
  std::vector<Branch> out;
  for (const auto& o : outcomes) {
    if (o.post_state) out.push_back({o.probability, *o.post_state});
  }
  return out;
}

StateVector couple_detector(const StateVector& state, const StateVector& detector_init,
                            const UnitaryOperator& u, std::span<const std::size_t> targets) {
  return apply_unitary(tensor(state, detector_init), u, targets);
}

UnitaryOperator controlled_shift_unitary(std::size_t system_dim, std::size_t detector_dim,
                                         std::span<const std::size_t> shifts) {
  if (shifts.size() != system_dim) {
    throw ContractError("controlled_shift_unitary: need one shift per system basis state");
  }
  const auto n = static_cast<Eigen::Index>(system_dim * detector_dim);
  CMatrix u = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < system_dim; ++j) {
    for (std::size_t k = 0; k < detector_dim; ++k) {
      const std::size_t to = j * detector_dim + (k + shifts[j]) % detector_dim;
      u(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(j * detector_dim + k)) = 1.0;
    }
  }
  return UnitaryOperator(std::move(u));
}

UnitaryOperator marking_unitary(std::size_t system_dim) {
  std::vector<std::size_t> shifts(system_dim);
  std::iota(shifts.begin(), shifts.end(), std::size_t{1});
  return controlled_shift_unitary(system_dim, system_dim + 1, shifts);
}

StateVector apply_controlled_shift(const StateVector& state, std::size_t control, std::size_t target,
                                   std::span<const std::size_t> shifts) {
  const HilbertShape& shape = state.shape();
  if (control >= shape.subsystems() || target >= shape.subsystems() || control == target) {
    throw ContractError("apply_controlled_shift: invalid control/target subsystems");
  }
  if (shifts.size() != shape.dim(control)) {
    throw ContractError("apply_controlled_shift: need one shift per control basis state");
  }
  const std::size_t targets[] = {control, target};
  const CMatrix m = coefficient_matrix(state.amplitudes(), shape, targets);
  const std::size_t dc = shape.dim(control);
  const std::size_t dt = shape.dim(target);
  CMatrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < dc; ++j) {
    for (std::size_t k = 0; k < dt; ++k) {
      const auto from = static_cast<Eigen::Index>(j * dt + k);
      const auto to = static_cast<Eigen::Index>(j * dt + (k + shifts[j]) % dt);
      out.row(to) = m.row(from);
    }
  }
  return StateVector(shape, from_coefficient_matrix(out, shape, targets), state.tolerance());
}

CutReport cut_compare(const StateVector& global, std::span<const std::size_t> keep,
                      std::span<const Branch> branches, std::span<const std::size_t> branch_keep) {
  if (branches.empty()) throw ContractError("cut_compare: no branches");
  const DensityOperator improper = reduce(global, keep);

  CutReport report;
  for (const auto& b : branches) report.total_weight += b.weight;
  report.complete = std::abs(report.total_weight - 1.0) <= kCompletenessTol;

  const auto n = static_cast<Eigen::Index>(improper.dim());
  CMatrix proper = CMatrix::Zero(n, n);
  for (const auto& b : branches) {
    const DensityOperator local = reduce(b.state, branch_keep);
    if (local.dim() != improper.dim()) throw ContractError("cut_compare: branch dimension mismatch");
    proper += (b.weight / report.total_weight) * local.matrix();
  }
  report.distance =
      trace_distance(improper, DensityOperator(improper.shape(), 0.5 * (proper + proper.adjoint())));
  return report;
}

CutReport simple_erasure_cut(const UnitaryOperator& first_side, const UnitaryOperator& second_side) {
  if (first_side.dim() != 6 || second_side.dim() != 4) {
    throw ContractError("simple_erasure_cut: expected 6x6 (D_I, I) and 4x4 (II, D_II) evolutions");
  }
  const double s = std::sqrt(0.5);
  CMatrix pm(2, 2);
  pm << s, s, s, -s;  // columns |+>, |->
  const UnitaryOperator to_pm(pm);

  // (D_I, I, II, D_II) = |0> ⊗ (1/2)^{1/2}(|11> + |22>) ⊗ |0>
  const StateVector source =
      tensor(tensor(StateVector::basis(3, 0), mark_which_way(s, s)), StateVector::basis(2, 0));

  // D_I records I's |±> outcome: |±_k>_I |0> -> |±_k>_I |k+1>.
  const std::size_t shifts[] = {1, 2};
  const UnitaryOperator record =
      kron(to_pm, UnitaryOperator::identity(3)) * controlled_shift_unitary(2, 3, shifts) *
      kron(to_pm.adjoint(), UnitaryOperator::identity(3));
  const std::size_t i_then_detector[] = {1, 0};
  StateVector global = apply_unitary(source, record, i_then_detector);

  const std::size_t detector_and_i[] = {0, 1};
  const std::size_t ii_and_detector[] = {2, 3};
  global = apply_unitary(global, first_side, detector_and_i);
  global = apply_unitary(global, second_side, ii_and_detector);

  // The evolved pointer states U|k, j> form a complete basis of (D_I, I)
  // even when first_side does not factorize.
  const CMatrix& u = first_side.matrix();
  std::vector<CVector> pointer;
  for (Eigen::Index c = 0; c < u.cols(); ++c) pointer.push_back(u.col(c));
  const auto outcomes = distant_measure(global, Bipartition{{0, 1}}, pointer);
  const auto branches = branches_from(outcomes);

  const std::size_t keep_ii[] = {2};
  const std::size_t branch_keep_ii[] = {0};  // branch states live on (II, D_II)
  return cut_compare(global, keep_ii, branches, branch_keep_ii);
}

}  // namespace erasure_lab
