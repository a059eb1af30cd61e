#include "erasure_lab/state_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace erasure_lab {

namespace {

void check_subsystem_list(const HilbertShape& shape, std::span<const std::size_t> list,
                          const char* what) {
  std::vector<bool> seen(shape.subsystems(), false);
  for (std::size_t s : list) {
    if (s >= shape.subsystems()) {
      throw ContractError(std::string(what) + ": subsystem index " + std::to_string(s) +
                          " out of range for shape " + to_string(shape));
    }
    if (seen[s]) {
      throw ContractError(std::string(what) + ": duplicate subsystem index " + std::to_string(s));
    }
    seen[s] = true;
  }
}

// For every flat index f of `shape`, the flat index of its restriction to
// `rows` (row) and to the complement (col). Walks the multi-index as an
// odometer instead of unflattening each index.
struct SplitIndex {
  std::vector<std::size_t> row;
  std::vector<std::size_t> col;
  std::size_t row_dim = 1;
  std::size_t col_dim = 1;
};

SplitIndex split_index(const HilbertShape& shape, std::span<const std::size_t> rows) {
  const auto cols = shape.complement(rows);
  const std::size_t k = shape.subsystems();
  std::vector<std::size_t> row_stride(k, 0);
  std::vector<std::size_t> col_stride(k, 0);

  SplitIndex out;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    row_stride[*it] = out.row_dim;
    out.row_dim *= shape.dim(*it);
  }
  for (auto it = cols.rbegin(); it != cols.rend(); ++it) {
    col_stride[*it] = out.col_dim;
    out.col_dim *= shape.dim(*it);
  }

  const std::size_t total = shape.total();
  out.row.resize(total);
  out.col.resize(total);
  std::vector<std::size_t> multi(k, 0);
  std::size_t r = 0;
  std::size_t c = 0;
  for (std::size_t f = 0; f < total; ++f) {
    out.row[f] = r;
    out.col[f] = c;
    for (std::size_t s = k; s-- > 0;) {
      ++multi[s];
      r += row_stride[s];
      c += col_stride[s];
      if (multi[s] < shape.dim(s)) break;
      r -= row_stride[s] * multi[s];
      c -= col_stride[s] * multi[s];
      multi[s] = 0;
    }
  }
  return out;
}

void check_proper_subset(const HilbertShape& shape, std::span<const std::size_t> keep) {
  check_subsystem_list(shape, keep, "partial_trace");
  if (keep.empty() || keep.size() == shape.subsystems()) {
    throw ContractError("partial_trace: keep must be a nonempty proper subset of " +
                        std::to_string(shape.subsystems()) + " subsystems");
  }
}

}  // namespace

// ── HilbertShape ─────────────────────────────────────────────────────────────

HilbertShape::HilbertShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ContractError("HilbertShape: at least one subsystem required");
  for (std::size_t d : dims_) {
    if (d < 1) throw ContractError("HilbertShape: subsystem dimensions must be >= 1");
    total_ *= d;
  }
}

HilbertShape HilbertShape::concat(const HilbertShape& other) const {
  auto dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return HilbertShape(std::move(dims));
}

HilbertShape HilbertShape::select(std::span<const std::size_t> subsystems) const {
  check_subsystem_list(*this, subsystems, "HilbertShape::select");
  std::vector<std::size_t> dims;
  dims.reserve(subsystems.size());
  for (std::size_t s : subsystems) dims.push_back(dims_[s]);
  return HilbertShape(std::move(dims));
}

std::vector<std::size_t> HilbertShape::complement(std::span<const std::size_t> subsystems) const {
  std::vector<bool> in(dims_.size(), false);
  for (std::size_t s : subsystems) {
    if (s < in.size()) in[s] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (!in[s]) out.push_back(s);
  }
  return out;
}

std::vector<std::size_t> HilbertShape::unflatten(std::size_t flat) const {
  if (flat >= total_) throw ContractError("HilbertShape::unflatten: index out of range");
  std::vector<std::size_t> multi(dims_.size());
  for (std::size_t s = dims_.size(); s-- > 0;) {
    multi[s] = flat % dims_[s];
    flat /= dims_[s];
  }
  return multi;
}

std::size_t HilbertShape::flatten(std::span<const std::size_t> multi) const {
  if (multi.size() != dims_.size()) throw ContractError("HilbertShape::flatten: arity mismatch");
  std::size_t flat = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (multi[s] >= dims_[s]) throw ContractError("HilbertShape::flatten: index out of range");
    flat = flat * dims_[s] + multi[s];
  }
  return flat;
}

std::string to_string(const HilbertShape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t s = 0; s < shape.subsystems(); ++s) {
    if (s) os << 'x';
    os << shape.dim(s);
  }
  os << ')';
  return os.str();
}

// ── StateVector ──────────────────────────────────────────────────────────────

StateVector::StateVector(HilbertShape shape, CVector amplitudes, double tolerance)
    : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)), tolerance_(tolerance) {
  if (static_cast<std::size_t>(amplitudes_.size()) != shape_.total()) {
    throw ContractError("StateVector: " + std::to_string(amplitudes_.size()) +
                        " amplitudes for shape " + to_string(shape_));
  }
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= tolerance_)) {
    std::ostringstream os;
    os.precision(17);
    os << "StateVector: norm " << norm << " differs from 1 by more than " << tolerance_;
    throw ContractError(os.str());
  }
}

StateVector StateVector::normalized(HilbertShape shape, CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw ContractError("StateVector::normalized: zero vector");
  amplitudes /= norm;
  return StateVector(std::move(shape), std::move(amplitudes));
}

StateVector StateVector::basis(HilbertShape shape, std::size_t flat_index) {
  if (flat_index >= shape.total()) throw ContractError("StateVector::basis: index out of range");
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(shape.total()));
  amps(static_cast<Eigen::Index>(flat_index)) = 1.0;
  return StateVector(std::move(shape), std::move(amps));
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  return basis(HilbertShape({dim}), index);
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw ContractError("StateVector::inner: dimension mismatch");
  return amplitudes_.dot(other.amplitudes_);
}

// ── DensityOperator ──────────────────────────────────────────────────────────

DensityOperator::DensityOperator(HilbertShape shape, CMatrix matrix)
    : shape_(std::move(shape)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(shape_.total());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw ContractError("DensityOperator: matrix is not " + std::to_string(n) + "x" +
                        std::to_string(n));
  }
  const double herm_dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kHermTol) {
    throw ContractError("DensityOperator: not Hermitian (max deviation " +
                        std::to_string(herm_dev) + ")");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ContractError("DensityOperator: trace " + std::to_string(tr.real()) + " is not 1");
  }
  if (eigenvalues().minCoeff() < kEigenFloor) {
    throw ContractError("DensityOperator: negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const StateVector& state) {
  const CVector& a = state.amplitudes();
  CMatrix rho = a * a.adjoint();
  return DensityOperator(state.shape(), 0.5 * (rho + rho.adjoint()));
}

DensityOperator DensityOperator::mixture(std::span<const double> weights,
                                         std::span<const StateVector> states) {
  if (weights.size() != states.size() || states.empty()) {
    throw ContractError("DensityOperator::mixture: need one weight per state");
  }
  const HilbertShape& shape = states.front().shape();
  const auto n = static_cast<Eigen::Index>(shape.total());
  CMatrix rho = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].shape() != shape) throw ContractError("DensityOperator::mixture: shape mismatch");
    if (weights[k] < 0.0) throw ContractError("DensityOperator::mixture: negative weight");
    const CVector& a = states[k].amplitudes();
    rho += weights[k] * (a * a.adjoint());
  }
  return DensityOperator(shape, 0.5 * (rho + rho.adjoint()));
}

Eigen::VectorXd DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// ── UnitaryOperator ──────────────────────────────────────────────────────────

UnitaryOperator::UnitaryOperator(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw ContractError("UnitaryOperator: matrix must be square and nonempty");
  }
  const double dev =
      (matrix_.adjoint() * matrix_ - CMatrix::Identity(matrix_.rows(), matrix_.cols())).norm();
  if (dev > kUnitaryTol) {
    throw ContractError("UnitaryOperator: U^dagger U deviates from identity by " +
                        std::to_string(dev));
  }
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryOperator(CMatrix::Identity(n, n));
}

UnitaryOperator UnitaryOperator::adjoint() const { return UnitaryOperator(matrix_.adjoint()); }

UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b) {
  const CMatrix& x = a.matrix();
  const CMatrix& y = b.matrix();
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return UnitaryOperator(std::move(out));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  if (a.dim() != b.dim()) throw ContractError("UnitaryOperator product: dimension mismatch");
  return UnitaryOperator(a.matrix() * b.matrix());
}

// ── operations ───────────────────────────────────────────────────────────────

CMatrix coefficient_matrix(const CVector& amplitudes, const HilbertShape& shape,
                           std::span<const std::size_t> rows) {
  check_subsystem_list(shape, rows, "coefficient_matrix");
  if (static_cast<std::size_t>(amplitudes.size()) != shape.total()) {
    throw ContractError("coefficient_matrix: amplitude count does not match shape");
  }
  const SplitIndex idx = split_index(shape, rows);
  CMatrix m(static_cast<Eigen::Index>(idx.row_dim), static_cast<Eigen::Index>(idx.col_dim));
  for (std::size_t f = 0; f < shape.total(); ++f) {
    m(static_cast<Eigen::Index>(idx.row[f]), static_cast<Eigen::Index>(idx.col[f])) =
        amplitudes(static_cast<Eigen::Index>(f));
  }
  return m;
}

CVector from_coefficient_matrix(const CMatrix& matrix, const HilbertShape& shape,
                                std::span<const std::size_t> rows) {
  check_subsystem_list(shape, rows, "from_coefficient_matrix");
  const SplitIndex idx = split_index(shape, rows);
  if (matrix.rows() != static_cast<Eigen::Index>(idx.row_dim) ||
      matrix.cols() != static_cast<Eigen::Index>(idx.col_dim)) {
    throw ContractError("from_coefficient_matrix: matrix dimensions do not match split");
  }
  CVector out(static_cast<Eigen::Index>(shape.total()));
  for (std::size_t f = 0; f < shape.total(); ++f) {
    out(static_cast<Eigen::Index>(f)) =
        matrix(static_cast<Eigen::Index>(idx.row[f]), static_cast<Eigen::Index>(idx.col[f]));
  }
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const CVector& x = a.amplitudes();
  const CVector& y = b.amplitudes();
  CVector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return StateVector(a.shape().concat(b.shape()), std::move(out),
                     std::max(a.tolerance(), b.tolerance()));
}

StateVector superpose(const HilbertShape& shape,
                      std::span<const std::pair<Complex, StateVector>> terms) {
  CVector sum = CVector::Zero(static_cast<Eigen::Index>(shape.total()));
  for (const auto& [c, psi] : terms) {
    if (psi.shape() != shape) throw ContractError("superpose: term shape mismatch");
    sum += c * psi.amplitudes();
  }
  return StateVector(shape, std::move(sum));
}

DensityOperator partial_trace(const StateVector& state, std::span<const std::size_t> keep) {
  check_proper_subset(state.shape(), keep);
  return reduce(state, keep);
}

DensityOperator reduce(const StateVector& state, std::span<const std::size_t> keep) {
  if (keep.empty()) throw ContractError("reduce: keep must be nonempty");
  const CMatrix m = coefficient_matrix(state.amplitudes(), state.shape(), keep);
  CMatrix rho = m * m.adjoint();
  return DensityOperator(state.shape().select(keep), 0.5 * (rho + rho.adjoint()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
  const HilbertShape& shape = rho.shape();
  check_proper_subset(shape, keep);
  const SplitIndex idx = split_index(shape, keep);

  // by_env[e][r] = flat index with kept part r and environment part e
  std::vector<std::vector<std::size_t>> by_env(idx.col_dim, std::vector<std::size_t>(idx.row_dim));
  for (std::size_t f = 0; f < shape.total(); ++f) by_env[idx.col[f]][idx.row[f]] = f;

  const auto n = static_cast<Eigen::Index>(idx.row_dim);
  CMatrix out = CMatrix::Zero(n, n);
  const CMatrix& m = rho.matrix();
  for (const auto& flats : by_env) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        out(i, j) += m(static_cast<Eigen::Index>(flats[static_cast<std::size_t>(i)]),
                       static_cast<Eigen::Index>(flats[static_cast<std::size_t>(j)]));
      }
    }
  }
  return DensityOperator(shape.select(keep), 0.5 * (out + out.adjoint()));
}

StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u,
                          std::span<const std::size_t> targets) {
  if (targets.empty()) throw ContractError("apply_unitary: no target subsystems");
  const HilbertShape target_shape = state.shape().select(targets);
  if (target_shape.total() != u.dim()) {
    throw ContractError("apply_unitary: unitary of dimension " + std::to_string(u.dim()) +
                        " does not match target dimension " + std::to_string(target_shape.total()));
  }
  const CMatrix m = coefficient_matrix(state.amplitudes(), state.shape(), targets);
  const CMatrix evolved = u.matrix() * m;
  return StateVector(state.shape(), from_coefficient_matrix(evolved, state.shape(), targets),
                     state.tolerance());
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw ContractError("trace_distance: dimension mismatch");
  const CMatrix diff = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (diff + diff.adjoint()),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

UnitaryOperator random_unitary(std::size_t dim, std::mt19937_64& rng) {
  // QR of a complex Ginibre matrix with the R-diagonal phases divided out
  // is Haar distributed.
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return UnitaryOperator(std::move(q));
}

StateVector random_state(const HilbertShape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector amps(static_cast<Eigen::Index>(shape.total()));
  for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = Complex(normal(rng), normal(rng));
  return StateVector::normalized(shape, std::move(amps));
}

}  // namespace erasure_lab
