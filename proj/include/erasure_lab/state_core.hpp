#pragma once

// Finite-dimensional Hilbert-space primitives: pure states, density
// operators, unitaries, tensor products and partial traces.
//
// Flattening convention: a multi-index (i_0, i_1, ..., i_{k-1}) over
// subsystem dimensions (d_0, ..., d_{k-1}) maps to the flat index
//     i_0 * d_1 * ... * d_{k-1} + ... + i_{k-1}
// i.e. row-major with subsystem 0 varying slowest. Every serialized
// quantity in the library follows this order.

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace erasure_lab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kEigenFloor = -1e-10;

/// Raised when an operation's precondition or a type invariant fails.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class HilbertShape {
 public:
  explicit HilbertShape(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t subsystems() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t subsystem) const { return dims_.at(subsystem); }
  std::size_t total() const noexcept { return total_; }

  HilbertShape concat(const HilbertShape& other) const;
  /// Shape of the listed subsystems, in the listed order.
  HilbertShape select(std::span<const std::size_t> subsystems) const;
  /// Ascending list of subsystems not in `subsystems`.
  std::vector<std::size_t> complement(std::span<const std::size_t> subsystems) const;

  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const std::size_t> multi) const;

  bool operator==(const HilbertShape&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

std::string to_string(const HilbertShape& shape);

/// Normalized pure state over a multi-subsystem space.
class StateVector {
 public:
  StateVector(HilbertShape shape, CVector amplitudes, double tolerance = kNormTol);

  /// Rescales `amplitudes` to unit norm; throws on a zero vector.
  static StateVector normalized(HilbertShape shape, CVector amplitudes);
  static StateVector basis(HilbertShape shape, std::size_t flat_index);
  /// |index> of a single subsystem of dimension `dim`.
  static StateVector basis(std::size_t dim, std::size_t index);

  const HilbertShape& shape() const noexcept { return shape_; }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  double tolerance() const noexcept { return tolerance_; }
  std::size_t dim() const noexcept { return shape_.total(); }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  /// <this|other>
  Complex inner(const StateVector& other) const;

 private:
  HilbertShape shape_;
  CVector amplitudes_;
  double tolerance_;
};

class DensityOperator {
 public:
  DensityOperator(HilbertShape shape, CMatrix matrix);

  static DensityOperator pure(const StateVector& state);
  /// Σ_k weights[k] |states[k]><states[k]|; weights must sum to one.
  static DensityOperator mixture(std::span<const double> weights,
                                 std::span<const StateVector> states);

  const HilbertShape& shape() const noexcept { return shape_; }
  const CMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return shape_.total(); }
  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;

 private:
  HilbertShape shape_;
  CMatrix matrix_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(CMatrix matrix);

  static UnitaryOperator identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const noexcept { return matrix_; }
  UnitaryOperator adjoint() const;

 private:
  CMatrix matrix_;
};

UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b);
UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);

/// Reorders the amplitudes into a matrix whose row index runs over `rows`
/// (in the listed order) and whose column index runs over the remaining
/// subsystems in ascending order.
CMatrix coefficient_matrix(const CVector& amplitudes, const HilbertShape& shape,
                           std::span<const std::size_t> rows);
/// Inverse of coefficient_matrix.
CVector from_coefficient_matrix(const CMatrix& matrix, const HilbertShape& shape,
                                std::span<const std::size_t> rows);

StateVector tensor(const StateVector& a, const StateVector& b);

/// Σ_k c_k |ψ_k>; all terms share `shape`. The result must be normalized.
StateVector superpose(const HilbertShape& shape,
                      std::span<const std::pair<Complex, StateVector>> terms);

DensityOperator partial_trace(const StateVector& state, std::span<const std::size_t> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep);

/// Reduced state over `keep`; unlike partial_trace, `keep` may be every subsystem.
DensityOperator reduce(const StateVector& state, std::span<const std::size_t> keep);

StateVector apply_unitary(const StateVector& state, const UnitaryOperator& u,
                          std::span<const std::size_t> targets);

/// ½‖ρ − σ‖₁
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

UnitaryOperator random_unitary(std::size_t dim, std::mt19937_64& rng);
StateVector random_state(const HilbertShape& shape, std::mt19937_64& rng);

}  // namespace erasure_lab
