#include "erasure_lab/erasure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace erasure_lab {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2;
const Complex kI{0.0, 1.0};

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

void check_bin(const DetectorArray& array, std::size_t n) {
  if (n < 1 || n > array.n_bins()) {
    throw ContractError("bin " + std::to_string(n) + " out of range 1.." +
                        std::to_string(array.n_bins()));
  }
}

// Midpoint nodes of bin n (1-based).
double node(const DetectorArray& array, std::size_t n, std::size_t q, std::size_t points) {
  const double h = array.bin_width() / static_cast<double>(points);
  return array.lower(n) + (static_cast<double>(q) + 0.5) * h;
}

}  // namespace

std::string_view to_string(MeasurementBasis b) {
  switch (b) {
    case MeasurementBasis::WhichWay:
      return "whichway";
    case MeasurementBasis::PlusMinus:
      return "pm";
    case MeasurementBasis::PlusMinusI:
      return "pmi";
  }
  return "pm";
}

std::string_view to_string(BornRule r) {
  return r == BornRule::IntensityIntegral ? "intensity" : "amplitude";
}

std::string_view to_string(TableMode m) {
  switch (m) {
    case TableMode::SimpleErasure:
      return "simple";
    case TableMode::DelayedChoice:
      return "delayed";
    case TableMode::WhichWay:
      return "whichway";
  }
  return "simple";
}

std::string_view to_string(OutcomeLabel d) {
  switch (d) {
    case OutcomeLabel::One:
      return "1";
    case OutcomeLabel::Two:
      return "2";
    case OutcomeLabel::Plus:
      return "+";
    case OutcomeLabel::Minus:
      return "-";
    case OutcomeLabel::PlusI:
      return "+i";
    case OutcomeLabel::MinusI:
      return "-i";
  }
  return "?";
}

std::vector<OutcomeLabel> outcome_labels(MeasurementBasis basis) {
  switch (basis) {
    case MeasurementBasis::WhichWay:
      return {OutcomeLabel::One, OutcomeLabel::Two};
    case MeasurementBasis::PlusMinus:
      return {OutcomeLabel::Plus, OutcomeLabel::Minus};
    case MeasurementBasis::PlusMinusI:
      return {OutcomeLabel::PlusI, OutcomeLabel::MinusI};
  }
  return {};
}

std::vector<CVector> measurement_vectors(MeasurementBasis basis) {
  switch (basis) {
    case MeasurementBasis::WhichWay:
      return {vec2(1.0, 0.0), vec2(0.0, 1.0)};
    case MeasurementBasis::PlusMinus:
      return {vec2(kInvSqrt2, kInvSqrt2), vec2(kInvSqrt2, -kInvSqrt2)};
    case MeasurementBasis::PlusMinusI:
      return {vec2(kInvSqrt2, kI * kInvSqrt2), vec2(kInvSqrt2, -kI * kInvSqrt2)};
  }
  return {};
}

CVector partner_slit_state(OutcomeLabel d) {
  switch (d) {
    case OutcomeLabel::One:
      return vec2(1.0, 0.0);
    case OutcomeLabel::Two:
      return vec2(0.0, 1.0);
    case OutcomeLabel::Plus:
      return vec2(kInvSqrt2, kInvSqrt2);
    case OutcomeLabel::Minus:
      return vec2(kInvSqrt2, -kInvSqrt2);
    case OutcomeLabel::PlusI:
      return vec2(kInvSqrt2, -kI * kInvSqrt2);
    case OutcomeLabel::MinusI:
      return vec2(kInvSqrt2, kI * kInvSqrt2);
  }
  throw ContractError("partner_slit_state: unknown outcome label");
}

// ── SlitModel / DetectorArray ────────────────────────────────────────────────

Complex SlitModel::slit_amplitude(int slit, double x) const {
  if (slit != 1 && slit != 2) throw ContractError("slit_amplitude: slit must be 1 or 2");
  if (std::abs(x) > 0.5 * envelope_width) return 0.0;
  const double sign = slit == 1 ? -1.0 : 1.0;
  return std::polar(1.0 / std::sqrt(envelope_width), sign * phase_gradient * x);
}

void SlitModel::validate() const {
  if (!(slit_separation > 0.0)) throw ContractError("slit_separation must be positive");
  if (!(envelope_width > 0.0)) throw ContractError("envelope_width must be positive");
  if (!(phase_gradient > 0.0)) throw ContractError("phase_gradient must be positive");
}

DetectorArray::DetectorArray(std::size_t n_bins, double bin_width)
    : n_bins_(n_bins), bin_width_(bin_width) {
  if (n_bins_ == 0) throw ContractError("n_bins must be positive");
  if (!(bin_width_ > 0.0)) throw ContractError("bin_width must be positive");
}

double DetectorArray::center(std::size_t n) const {
  check_bin(*this, n);
  const double first = -0.5 * span() + 0.5 * bin_width_;
  return first + static_cast<double>(n - 1) * bin_width_;
}

// ── ProbabilityTable ─────────────────────────────────────────────────────────

ProbabilityTable::ProbabilityTable(TableMode mode, std::vector<OutcomeLabel> labels,
                                   std::vector<double> centers,
                                   std::vector<std::vector<double>> entries)
    : mode_(mode), labels_(std::move(labels)), centers_(std::move(centers)), entries_(std::move(entries)) {
  if (entries_.size() != labels_.size()) throw ContractError("ProbabilityTable: one row per outcome");
  for (const auto& row : entries_) {
    if (row.size() != centers_.size()) throw ContractError("ProbabilityTable: ragged rows");
    for (double p : row) {
      if (!(p >= 0.0)) throw ContractError("ProbabilityTable: negative or NaN entry");
    }
  }
}

double ProbabilityTable::total() const {
  double sum = 0.0;
  for (const auto& row : entries_) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

std::vector<double> ProbabilityTable::screen_marginal() const {
  std::vector<double> out(centers_.size(), 0.0);
  for (const auto& row : entries_) {
    for (std::size_t n = 0; n < row.size(); ++n) out[n] += row[n];
  }
  return out;
}

// ── screen probabilities ─────────────────────────────────────────────────────

Complex screen_amplitude(const SlitModel& model, const CVector& slit_state, double x) {
  if (slit_state.size() != 2) throw ContractError("screen_amplitude: slit state must be 2-dimensional");
  return slit_state(0) * model.slit_amplitude(1, x) + slit_state(1) * model.slit_amplitude(2, x);
}

Complex screen_amplitude(const SlitModel& model, OutcomeLabel d, double x) {
  return screen_amplitude(model, partner_slit_state(d), x);
}

double bin_probability(const SlitModel& model, const DetectorArray& array, const CVector& slit_state,
                       std::size_t n, BornRule rule, std::size_t quadrature_points) {
  check_bin(array, n);
  if (quadrature_points == 0) throw ContractError("quadrature_points must be positive");
  const double h = array.bin_width() / static_cast<double>(quadrature_points);
  if (rule == BornRule::IntensityIntegral) {
    double sum = 0.0;
    for (std::size_t q = 0; q < quadrature_points; ++q) {
      sum += std::norm(screen_amplitude(model, slit_state, node(array, n, q, quadrature_points)));
    }
    return sum * h;
  }
  Complex sum = 0.0;
  for (std::size_t q = 0; q < quadrature_points; ++q) {
    sum += screen_amplitude(model, slit_state, node(array, n, q, quadrature_points));
  }
  return std::norm(sum * h);
}

double bin_probability(const SlitModel& model, const DetectorArray& array, OutcomeLabel d,
                       std::size_t n, BornRule rule, std::size_t quadrature_points) {
  return bin_probability(model, array, partner_slit_state(d), n, rule, quadrature_points);
}

namespace {

// Columns: the slit images sampled on the quadrature grid, scaled by √h.
CMatrix slit_images_on_grid(const SlitModel& model, const DetectorArray& array,
                            std::size_t quadrature_points) {
  const std::size_t m = array.n_bins() * quadrature_points;
  const double sqrt_h = std::sqrt(array.bin_width() / static_cast<double>(quadrature_points));
  CMatrix images(static_cast<Eigen::Index>(m), 2);
  for (std::size_t n = 1; n <= array.n_bins(); ++n) {
    for (std::size_t q = 0; q < quadrature_points; ++q) {
      const auto row = static_cast<Eigen::Index>((n - 1) * quadrature_points + q);
      const double x = node(array, n, q, quadrature_points);
      images(row, 0) = sqrt_h * model.slit_amplitude(1, x);
      images(row, 1) = sqrt_h * model.slit_amplitude(2, x);
    }
  }
  return images;
}

StateVector prepared_source(const ErasureConfig& config) {
  StateVector psi = mark_which_way(kInvSqrt2, kInvSqrt2);
  if (config.evolution_first) {
    const std::size_t first[] = {0};
    psi = apply_unitary(psi, *config.evolution_first, first);
  }
  return psi;
}

std::vector<double> bin_centers(const DetectorArray& array) {
  std::vector<double> c;
  for (std::size_t n = 1; n <= array.n_bins(); ++n) c.push_back(array.center(n));
  return c;
}

}  // namespace

void validate_geometry(const SlitModel& model, const DetectorArray& array,
                       std::size_t quadrature_points) {
  model.validate();
  if (quadrature_points == 0) throw ContractError("quadrature_points must be positive");
  const CMatrix images = slit_images_on_grid(model, array, quadrature_points);
  const double dev = (images.adjoint() * images - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  if (dev > kGridIsometryTol) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "slit images are not orthonormal on the detector grid (deviation %.3g > %.0e); "
                  "the detector must cover the aperture and phase_gradient*envelope_width must be "
                  "a multiple of pi",
                  dev, kGridIsometryTol);
    throw ContractError(buf);
  }
}

ProbabilityTable run_simple_erasure(const ErasureConfig& config) {
  validate_geometry(config.model, config.array, config.quadrature_points);
  const StateVector psi = prepared_source(config);
  const Bipartition split{{0}};
  const auto basis = measurement_vectors(config.basis);
  const auto outcomes = distant_measure(psi, split, basis);

  std::vector<std::vector<double>> entries;
  for (const auto& o : outcomes) {
    std::vector<double> row(config.array.n_bins(), 0.0);
    if (o.post_state) {
      for (std::size_t n = 1; n <= config.array.n_bins(); ++n) {
        row[n - 1] = o.probability * bin_probability(config.model, config.array,
                                                     o.post_state->amplitudes(), n, config.rule,
                                                     config.quadrature_points);
      }
    }
    entries.push_back(std::move(row));
  }
  const TableMode mode = config.basis == MeasurementBasis::WhichWay ? TableMode::WhichWay
                                                                    : TableMode::SimpleErasure;
  return ProbabilityTable(mode, outcome_labels(config.basis), bin_centers(config.array),
                          std::move(entries));
}

ProbabilityTable run_delayed_choice(const ErasureConfig& config) {
  validate_geometry(config.model, config.array, config.quadrature_points);
  const std::size_t n_bins = config.array.n_bins();
  const std::size_t points = config.quadrature_points;
  const std::size_t grid = n_bins * points;

  // I ⊗ screen grid: (1 ⊗ U_II)|Ψ>, U_II the slit-to-screen isometry.
  const StateVector source = prepared_source(config);
  const std::size_t first[] = {0};
  const CMatrix coeff = coefficient_matrix(source.amplitudes(), source.shape(), first);
  const CMatrix on_screen = coeff * slit_images_on_grid(config.model, config.array, points).transpose();
  const HilbertShape screen_shape({2, grid});
  const StateVector at_screen(screen_shape, from_coefficient_matrix(on_screen, screen_shape, first));

  // Localization detector: |x_m>|k> -> |x_m>|k + n(x_m)>, register |0> untriggered.
  const StateVector detector_ready = StateVector::basis(n_bins + 1, 0);
  std::vector<std::size_t> bin_of_node(grid);
  for (std::size_t m = 0; m < grid; ++m) bin_of_node[m] = m / points + 1;
  const StateVector detected = apply_controlled_shift(tensor(at_screen, detector_ready), 1, 2, bin_of_node);

  // Only now is particle I measured.
  const auto outcomes = distant_measure(detected, Bipartition{{0}}, measurement_vectors(config.basis));

  const double sqrt_h = std::sqrt(config.array.bin_width() / static_cast<double>(points));
  std::vector<std::vector<double>> entries;
  for (const auto& o : outcomes) {
    std::vector<double> row(n_bins, 0.0);
    if (o.post_state) {
      const std::size_t screen[] = {0};
      const CMatrix post = coefficient_matrix(o.post_state->amplitudes(), o.post_state->shape(), screen);
      for (std::size_t n = 1; n <= n_bins; ++n) {
        const auto block = post.col(static_cast<Eigen::Index>(n))
                               .segment(static_cast<Eigen::Index>((n - 1) * points),
                                        static_cast<Eigen::Index>(points));
        const double reading = config.rule == BornRule::IntensityIntegral
                                   ? block.squaredNorm()
                                   : std::norm(sqrt_h * block.sum());
        row[n - 1] = o.probability * reading;
      }
    }
    entries.push_back(std::move(row));
  }
  return ProbabilityTable(TableMode::DelayedChoice, outcome_labels(config.basis),
                          bin_centers(config.array), std::move(entries));
}

EqualityReport verify_equality(const ProbabilityTable& a, const ProbabilityTable& b, double tolerance) {
  // Outcomes are compared by position, so tables from different bases can be contrasted.
  if (a.labels().size() != b.labels().size() || a.n_bins() != b.n_bins()) {
    throw ContractError("verify_equality: tables have different (d, n) index sets");
  }
  EqualityReport report;
  report.tolerance = tolerance;
  report.worst_bin = 1;
  for (std::size_t d = 0; d < a.labels().size(); ++d) {
    for (std::size_t n = 1; n <= a.n_bins(); ++n) {
      const double dev = std::abs(a.at(d, n) - b.at(d, n));
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        report.worst_outcome = d;
        report.worst_bin = n;
      }
    }
  }
  report.pass = report.max_deviation <= tolerance;
  return report;
}

double fringe_visibility(std::span<const double> pattern) {
  if (pattern.empty()) throw ContractError("fringe_visibility: empty pattern");
  const auto [lo, hi] = std::minmax_element(pattern.begin(), pattern.end());
  const double denom = *hi + *lo;
  return denom > 0.0 ? (*hi - *lo) / denom : 0.0;
}

std::string to_csv(const ProbabilityTable& table) {
  std::string out = "mode,d,n,x_center,p\n";
  char buf[128];
  for (std::size_t d = 0; d < table.labels().size(); ++d) {
    for (std::size_t n = 1; n <= table.n_bins(); ++n) {
      std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.17g,%.17g\n", to_string(table.mode()).data(),
                    to_string(table.labels()[d]).data(), n, table.centers()[n - 1], table.at(d, n));
      out += buf;
    }
  }
  return out;
}

}  // namespace erasure_lab
