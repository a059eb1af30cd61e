#pragma once

// Two-slit screen model and the two erasure pipelines.
//
// The slit states |1>, |2> of particle II reach the screen as
//     ψ_j(x) = g(x) exp(i (−1)^j κ x),   g(x) = W^{-1/2} on |x| ≤ W/2, else 0,
// a uniform aperture image of width W with opposite phase gradients. For
// κW a multiple of π the two images are orthogonal, so the slit-to-screen
// map is an isometry.
//
// Simple erasure measures particle I first and integrates the conditional
// screen wavefunction of II over each detector bin. Delayed choice builds
// the I ⊗ screen-grid ⊗ detector-register state, lets the register record
// the bin of II, and only then measures I; probabilities are read off the
// composite state.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erasure_lab/measurement.hpp"
#include "erasure_lab/state_core.hpp"

namespace erasure_lab {

inline constexpr double kEqualityTol = 1e-9;
inline constexpr double kGridIsometryTol = 1e-10;

enum class MeasurementBasis { WhichWay, PlusMinus, PlusMinusI };
enum class BornRule { IntensityIntegral, AmplitudeIntegral };
enum class TableMode { SimpleErasure, DelayedChoice, WhichWay };
enum class OutcomeLabel { One, Two, Plus, Minus, PlusI, MinusI };

std::string_view to_string(MeasurementBasis b);
std::string_view to_string(BornRule r);
std::string_view to_string(TableMode m);
std::string_view to_string(OutcomeLabel d);

/// Outcome labels of a measurement basis, in basis order.
std::vector<OutcomeLabel> outcome_labels(MeasurementBasis basis);
/// The basis on subsystem I: {|1>,|2>}, {|+>,|->} or {|+i>,|−i>}.
std::vector<CVector> measurement_vectors(MeasurementBasis basis);
/// Slit-space state of II paired with outcome d of I (|+i> pairs with (|1> − i|2>)/√2).
CVector partner_slit_state(OutcomeLabel d);

struct SlitModel {
  double slit_separation = 1.0;
  double envelope_width = 8.0;                  // W
  double phase_gradient = 0.39269908169872414;  // κ = π/8

  /// ψ_1 or ψ_2.
  Complex slit_amplitude(int slit, double x) const;
  /// Effective wavenumber k = 2κ/s at unit screen distance.
  double wavenumber() const { return 2.0 * phase_gradient / slit_separation; }
  void validate() const;
};

class DetectorArray {
 public:
  /// `n_bins` contiguous bins of width `bin_width`, symmetric about x = 0.
  DetectorArray(std::size_t n_bins, double bin_width);

  std::size_t n_bins() const noexcept { return n_bins_; }
  double bin_width() const noexcept { return bin_width_; }
  double span() const noexcept { return bin_width_ * static_cast<double>(n_bins_); }
  /// x_n = x_1 + (n − 1)Δx, n = 1..N.
  double center(std::size_t n) const;
  double lower(std::size_t n) const { return center(n) - 0.5 * bin_width_; }

 private:
  std::size_t n_bins_;
  double bin_width_;
};

struct ErasureConfig {
  SlitModel model;
  DetectorArray array{16, 0.5};
  MeasurementBasis basis = MeasurementBasis::PlusMinus;
  BornRule rule = BornRule::IntensityIntegral;
  std::size_t quadrature_points = 256;  // midpoint nodes per bin
  /// Evolution of particle I before its measurement; identity when empty.
  std::optional<UnitaryOperator> evolution_first;
};

class ProbabilityTable {
 public:
  ProbabilityTable(TableMode mode, std::vector<OutcomeLabel> labels, std::vector<double> centers,
                   std::vector<std::vector<double>> entries);

  TableMode mode() const noexcept { return mode_; }
  const std::vector<OutcomeLabel>& labels() const noexcept { return labels_; }
  const std::vector<double>& centers() const noexcept { return centers_; }
  std::size_t n_bins() const noexcept { return centers_.size(); }
  /// p(d, n) with d the outcome position and n = 1..N.
  double at(std::size_t d, std::size_t n) const { return entries_.at(d).at(n - 1); }
  /// p(d, ·)
  const std::vector<double>& row(std::size_t d) const { return entries_.at(d); }

  double total() const;
  /// Σ_d p(d, n) for every n.
  std::vector<double> screen_marginal() const;

 private:
  TableMode mode_;
  std::vector<OutcomeLabel> labels_;
  std::vector<double> centers_;
  std::vector<std::vector<double>> entries_;
};

Complex screen_amplitude(const SlitModel& model, const CVector& slit_state, double x);
Complex screen_amplitude(const SlitModel& model, OutcomeLabel d, double x);

double bin_probability(const SlitModel& model, const DetectorArray& array, const CVector& slit_state,
                       std::size_t n, BornRule rule, std::size_t quadrature_points = 256);
double bin_probability(const SlitModel& model, const DetectorArray& array, OutcomeLabel d,
                       std::size_t n, BornRule rule, std::size_t quadrature_points = 256);

/// Throws ContractError unless the slit images sampled on the detector's
/// quadrature grid are orthonormal within kGridIsometryTol (full coverage,
/// isometric slit-to-screen map).
void validate_geometry(const SlitModel& model, const DetectorArray& array,
                       std::size_t quadrature_points);

ProbabilityTable run_simple_erasure(const ErasureConfig& config);
ProbabilityTable run_delayed_choice(const ErasureConfig& config);

struct EqualityReport {
  double max_deviation = 0.0;
  std::size_t worst_outcome = 0;
  std::size_t worst_bin = 0;  // 1-based
  double tolerance = kEqualityTol;
  bool pass = false;
};

EqualityReport verify_equality(const ProbabilityTable& a, const ProbabilityTable& b,
                               double tolerance = kEqualityTol);

/// (max − min)/(max + min) over a pattern.
double fringe_visibility(std::span<const double> pattern);

/// Header `mode,d,n,x_center,p`, values with 17 significant digits.
std::string to_csv(const ProbabilityTable& table);

}  // namespace erasure_lab
