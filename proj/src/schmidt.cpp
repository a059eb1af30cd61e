#include "erasure_lab/schmidt.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/SVD>

namespace erasure_lab {

void Bipartition::validate(const HilbertShape& shape) const {
  if (first.empty() || first.size() >= shape.subsystems()) {
    throw ContractError("Bipartition: first part must be a nonempty proper subset of " +
                        std::to_string(shape.subsystems()) + " subsystems");
  }
  (void)shape.select(first);  // range and duplicate checks
}

double orthonormality_error(std::span<const CVector> vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      const Complex g = vectors[i].dot(vectors[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

SchmidtDecomposition::SchmidtDecomposition(HilbertShape shape, Bipartition split,
                                           std::vector<double> coefficients,
                                           std::vector<CVector> basis_first,
                                           std::vector<CVector> basis_second)
    : shape_(std::move(shape)),
      split_(std::move(split)),
      coefficients_(std::move(coefficients)),
      basis_first_(std::move(basis_first)),
      basis_second_(std::move(basis_second)) {
  split_.validate(shape_);
  const std::size_t n = coefficients_.size();
  if (n == 0 || basis_first_.size() != n || basis_second_.size() != n) {
    throw ContractError("SchmidtDecomposition: need one vector pair per coefficient");
  }
  const auto dim_first = static_cast<Eigen::Index>(shape_.select(split_.first).total());
  const auto dim_second = static_cast<Eigen::Index>(shape_.total()) / dim_first;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(coefficients_[k] > 0.0)) throw ContractError("SchmidtDecomposition: nonpositive coefficient");
    if (basis_first_[k].size() != dim_first || basis_second_[k].size() != dim_second) {
      throw ContractError("SchmidtDecomposition: basis vector dimension mismatch");
    }
    total += coefficients_[k] * coefficients_[k];
  }
  if (std::abs(total - 1.0) > kNormTol) {
    throw ContractError("SchmidtDecomposition: squared coefficients sum to " + std::to_string(total));
  }
  if (orthonormality_error(basis_first_) > kOrthonormalTol ||
      orthonormality_error(basis_second_) > kOrthonormalTol) {
    throw ContractError("SchmidtDecomposition: bases are not orthonormal");
  }
}

std::vector<double> SchmidtDecomposition::weights() const {
  std::vector<double> r;
  r.reserve(coefficients_.size());
  for (double c : coefficients_) r.push_back(c * c);
  return r;
}

StateVector SchmidtDecomposition::reconstruct() const {
  const auto rows = basis_first_.front().size();
  const auto cols = basis_second_.front().size();
  CMatrix m = CMatrix::Zero(rows, cols);
  for (std::size_t k = 0; k < rank(); ++k) {
    m += coefficients_[k] * basis_first_[k] * basis_second_[k].transpose();
  }
  return StateVector(shape_, from_coefficient_matrix(m, shape_, split_.first));
}

SchmidtDecomposition schmidt_decompose(const StateVector& state, const Bipartition& split) {
  split.validate(state.shape());
  const CMatrix m = coefficient_matrix(state.amplitudes(), state.shape(), split.first);

  // m = U S V^dagger, so |ψ> = Σ_k s_k |U_k> ⊗ |conj(V_k)>.
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();

  std::vector<double> coefficients;
  std::vector<CVector> first;
  std::vector<CVector> second;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= kRankTol) break;  // JacobiSVD sorts descending
    CVector u = svd.matrixU().col(k);
    CVector v = svd.matrixV().col(k).conjugate();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (std::abs(u(i)) > kRankTol) {
        const Complex phase = u(i) / std::abs(u(i));
        u /= phase;
        v *= phase;
        break;
      }
    }
    coefficients.push_back(s(k));
    first.push_back(std::move(u));
    second.push_back(std::move(v));
  }

  // Renormalize away the ~1e-16 drift of the singular values.
  const double norm = std::sqrt(std::inner_product(coefficients.begin(), coefficients.end(),
                                                   coefficients.begin(), 0.0));
  for (double& c : coefficients) c /= norm;

  return SchmidtDecomposition(state.shape(), split, std::move(coefficients), std::move(first),
                              std::move(second));
}

bool is_epr_type(const SchmidtDecomposition& dec, double degeneracy_tol) {
  const auto r = dec.weights();
  for (std::size_t j = 0; j < r.size(); ++j) {
    for (std::size_t k = j + 1; k < r.size(); ++k) {
      if (r[j] > kRankTol && r[k] > kRankTol && std::abs(r[j] - r[k]) <= degeneracy_tol) {
        return true;
      }
    }
  }
  return false;
}

CorrelationOperator::CorrelationOperator(CMatrix isometry, std::vector<CVector> domain_basis)
    : isometry_(std::move(isometry)), domain_basis_(std::move(domain_basis)) {
  if (domain_basis_.empty()) throw ContractError("CorrelationOperator: empty domain basis");
  if (orthonormality_error(domain_basis_) > kOrthonormalTol) {
    throw ContractError("CorrelationOperator: domain basis is not orthonormal");
  }
  std::vector<CVector> images;
  for (const auto& e : domain_basis_) {
    if (e.size() != isometry_.cols()) throw ContractError("CorrelationOperator: dimension mismatch");
    images.push_back(isometry_ * e.conjugate());
  }
  if (orthonormality_error(images) > kOrthonormalTol) {
    throw ContractError("CorrelationOperator: map is not isometric on its domain");
  }
}

CVector CorrelationOperator::apply(const CVector& v) const {
  if (v.size() != isometry_.cols()) throw ContractError("CorrelationOperator::apply: dimension mismatch");
  return isometry_ * v.conjugate();
}

CorrelationOperator correlation_operator(const SchmidtDecomposition& dec) {
  // V conj(u_k) = v_k for each Schmidt pair, so V = Σ_k v_k u_k^T.
  const auto rows = dec.basis_second().front().size();
  const auto cols = dec.basis_first().front().size();
  CMatrix v = CMatrix::Zero(rows, cols);
  for (std::size_t k = 0; k < dec.rank(); ++k) {
    v += dec.basis_second()[k] * dec.basis_first()[k].transpose();
  }
  return CorrelationOperator(std::move(v), dec.basis_first());
}

SchmidtDecomposition reschmidt(const StateVector& state, const Bipartition& split,
                               std::span<const CVector> new_basis_first) {
  split.validate(state.shape());
  const CMatrix m = coefficient_matrix(state.amplitudes(), state.shape(), split.first);
  const CMatrix rho = m * m.adjoint();

  const std::size_t rank = schmidt_decompose(state, split).rank();
  if (new_basis_first.size() != rank) {
    throw ContractError("reschmidt: basis has " + std::to_string(new_basis_first.size()) +
                        " vectors but the state has Schmidt rank " + std::to_string(rank));
  }
  for (const auto& e : new_basis_first) {
    if (e.size() != m.rows()) throw ContractError("reschmidt: basis vector dimension mismatch");
  }
  if (orthonormality_error(new_basis_first) > kOrthonormalTol) {
    throw ContractError("reschmidt: new basis is not orthonormal");
  }

  std::vector<double> coefficients;
  std::vector<CVector> first;
  std::vector<CVector> second;
  for (std::size_t k = 0; k < new_basis_first.size(); ++k) {
    const CVector& e = new_basis_first[k];
    const double r = e.dot(rho * e).real();
    const double residual = (rho * e - r * e).norm();
    if (residual > kEigenResidualTol || r <= kRankTol * kRankTol) {
      std::ostringstream os;
      os << "reschmidt: basis vector " << k
         << " is not an eigenvector of the reduced state on its support (residual " << residual
         << ", weight " << r
         << "); the state is not EPR-type there, so the expansion would not be biorthogonal";
      throw ContractError(os.str());
    }
    CVector partner = m.transpose() * e.conjugate();
    const double c = partner.norm();
    coefficients.push_back(c);
    first.push_back(e);
    second.push_back(partner / c);
  }
  return SchmidtDecomposition(state.shape(), split, std::move(coefficients), std::move(first),
                              std::move(second));
}

}  // namespace erasure_lab
