#include "erasure_lab/coherence.hpp"

#include <cmath>
#include <string>

namespace erasure_lab {

namespace {

Complex cis(double angle) { return std::polar(1.0, angle); }

double distance(const CVector& a, const CVector& b) { return (a - b).norm(); }

}  // namespace

CoherenceBasisParams CoherenceBasisParams::balanced(double lambda, double delta, double gamma) {
  CoherenceBasisParams params;
  params.lambda = lambda;
  params.delta = delta;
  params.gamma = gamma;
  return params;
}

void CoherenceBasisParams::validate() const {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw ContractError("CoherenceBasisParams: p and q must lie in (0, 1)");
  }
  if (std::abs(p * p + q * q - 1.0) > 1e-12) {
    throw ContractError("CoherenceBasisParams: p^2 + q^2 must equal 1");
  }
}

std::string_view to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::TermwiseSymmetric:
      return "TermwiseSymmetric";
    case SymmetryClass::TermSwapping:
      return "TermSwapping";
    case SymmetryClass::Neither:
      return "Neither";
  }
  return "Neither";
}

std::pair<StateVector, StateVector> coherence_pair(const CoherenceBasisParams& params) {
  params.validate();
  const auto& [p, q, lambda, delta, gamma] = params;
  CVector a(2);
  a << cis(lambda) * p, cis(delta) * q;
  CVector b(2);
  b << cis(gamma) * q, cis(gamma + delta - lambda + std::numbers::pi) * p;
  const HilbertShape shape({2});
  return {StateVector(shape, std::move(a)), StateVector(shape, std::move(b))};
}

UnitaryOperator exchange_operator(std::size_t d) {
  if (d == 0) throw ContractError("exchange_operator: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(d * d);
  CMatrix x = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      x(static_cast<Eigen::Index>(k * d + j), static_cast<Eigen::Index>(j * d + k)) = 1.0;
    }
  }
  return UnitaryOperator(std::move(x));
}

SymmetryClass classify_symmetry(const SchmidtDecomposition& dec) {
  if (dec.rank() != 2 || dec.shape().total() != 4 || dec.basis_first().front().size() != 2) {
    throw ContractError("classify_symmetry: needs a rank-2 decomposition on a 2x2 space (got rank " +
                        std::to_string(dec.rank()) + ")");
  }
  const auto& u = dec.basis_first();
  const auto& v = dec.basis_second();
  if (distance(u[0], v[0]) <= kSymmetryTol && distance(u[1], v[1]) <= kSymmetryTol) {
    return SymmetryClass::TermwiseSymmetric;
  }
  if (distance(u[0], v[1]) <= kSymmetryTol && distance(u[1], v[0]) <= kSymmetryTol &&
      std::abs(dec.coefficients()[0] - dec.coefficients()[1]) <= kSymmetryTol) {
    return SymmetryClass::TermSwapping;
  }
  return SymmetryClass::Neither;
}

StateVector maximally_entangled_pair() {
  CVector amps = CVector::Zero(4);
  amps(0) = std::numbers::sqrt2 / 2;
  amps(3) = std::numbers::sqrt2 / 2;
  return StateVector(HilbertShape({2, 2}), std::move(amps));
}

std::vector<BasisSearchHit> search_symmetric_bases(std::size_t grid_steps, double p) {
  if (grid_steps < 8) throw ContractError("search_symmetric_bases: grid_steps must be >= 8");
  const StateVector psi = maximally_entangled_pair();
  const Bipartition split{{0}};
  const double step = 2.0 * std::numbers::pi / static_cast<double>(grid_steps);

  std::vector<BasisSearchHit> hits;
  for (std::size_t i = 0; i < grid_steps; ++i) {
    for (std::size_t j = 0; j < grid_steps; ++j) {
      CoherenceBasisParams params;
      params.p = p;
      params.q = std::sqrt(1.0 - p * p);
      params.lambda = step * static_cast<double>(i);
      params.delta = step * static_cast<double>(j);
      params.gamma = 0.0;
      const auto [a, b] = coherence_pair(params);
      const CVector basis[] = {a.amplitudes(), b.amplitudes()};
      const auto cls = classify_symmetry(reschmidt(psi, split, basis));
      if (cls != SymmetryClass::Neither) hits.push_back({params, cls});
    }
  }
  return hits;
}

}  // namespace erasure_lab
