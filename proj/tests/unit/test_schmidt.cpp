#include <doctest.h>

#include <cmath>
#include <random>

#include "erasure_lab/coherence.hpp"
#include "erasure_lab/schmidt.hpp"
#include "oracles.hpp"

using namespace erasure_lab;

namespace {

const double s = std::sqrt(0.5);
const Complex I(0.0, 1.0);
const Bipartition kSplit{{0}};

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

// |u> and |v> agree up to a global phase.
double phase_distance(const CVector& u, const CVector& v) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(u.dot(v))));
}

}  // namespace

TEST_CASE("maximally entangled pair has two equal coefficients") {
  const auto dec = schmidt_decompose(maximally_entangled_pair(), kSplit);
  REQUIRE(dec.rank() == 2);
  CHECK(std::abs(dec.coefficients()[0] - s) < 1e-15);
  CHECK(std::abs(dec.coefficients()[1] - s) < 1e-15);
  CHECK(is_epr_type(dec));
}

TEST_CASE("product state has rank one") {
  const auto prod = tensor(StateVector::basis(2, 0), StateVector::basis(2, 1));
  const auto dec = schmidt_decompose(prod, kSplit);
  CHECK(dec.rank() == 1);
  CHECK(std::abs(dec.coefficients()[0] - 1.0) < 1e-15);
  CHECK_FALSE(is_epr_type(dec));
}

TEST_CASE("non-degenerate weights are not EPR-type") {
  CVector a = CVector::Zero(4);
  a(0) = std::sqrt(0.6);
  a(3) = std::sqrt(0.4);
  const auto dec = schmidt_decompose(StateVector(HilbertShape({2, 2}), a), kSplit);
  CHECK_FALSE(is_epr_type(dec, 1e-6));
  CHECK(is_epr_type(dec, 0.3));
}

TEST_CASE("coefficients are descending and first vectors carry the phase convention") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto dec = schmidt_decompose(random_state(HilbertShape({3, 3}), rng), kSplit);
    for (std::size_t k = 1; k < dec.rank(); ++k) CHECK(dec.coefficients()[k - 1] >= dec.coefficients()[k]);
    for (const auto& u : dec.basis_first()) {
      Eigen::Index i = 0;
      while (std::abs(u(i)) <= 1e-10) ++i;
      CHECK(std::abs(u(i).imag()) < 1e-14);
      CHECK(u(i).real() > 0.0);
    }
  }
}

TEST_CASE("squared coefficients match the spectra of both reduced states") {
  std::mt19937_64 rng(17);
  const std::pair<Eigen::Index, Eigen::Index> dims[] = {{2, 2}, {2, 3}, {3, 3}, {3, 2}, {2, 4}};
  for (const auto& [d1, d2] : dims) {
    for (int t = 0; t < 20; ++t) {
      const auto psi = random_state(HilbertShape({std::size_t(d1), std::size_t(d2)}), rng);
      const auto dec = schmidt_decompose(psi, kSplit);
      auto r = dec.weights();
      std::sort(r.begin(), r.end());
      for (const CMatrix& rho : {oracle::reduce_first(psi.amplitudes(), d1, d2),
                                 oracle::reduce_second(psi.amplitudes(), d1, d2)}) {
        auto ev = oracle::hermitian_eigenvalues(rho);
        // drop the zero eigenvalues beyond the rank
        ev.erase(ev.begin(), ev.end() - static_cast<std::ptrdiff_t>(r.size()));
        for (std::size_t k = 0; k < r.size(); ++k) CHECK(std::abs(ev[k] - r[k]) < 1e-10);
      }
      CHECK((dec.reconstruct().amplitudes() - psi.amplitudes()).norm() < 1e-9);
    }
  }
}

TEST_CASE("multipartite splits reconstruct in the original subsystem order") {
  std::mt19937_64 rng(23);
  const auto psi = random_state(HilbertShape({2, 3, 2}), rng);
  for (const Bipartition split : {Bipartition{{1}}, Bipartition{{2, 0}}, Bipartition{{0, 1}}}) {
    const auto dec = schmidt_decompose(psi, split);
    CHECK((dec.reconstruct().amplitudes() - psi.amplitudes()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(schmidt_decompose(psi, Bipartition{{0, 1, 2}}), ContractError);
  CHECK_THROWS_AS(schmidt_decompose(psi, Bipartition{{}}), ContractError);
  CHECK_THROWS_AS(schmidt_decompose(psi, Bipartition{{3}}), ContractError);
}

TEST_CASE("decomposition constructor enforces its invariants") {
  const HilbertShape shape({2, 2});
  const CVector e0 = vec2(1, 0), e1 = vec2(0, 1);
  CHECK_THROWS_AS(SchmidtDecomposition(shape, kSplit, {0.5, 0.5}, {e0, e1}, {e0, e1}), ContractError);
  CHECK_THROWS_AS(SchmidtDecomposition(shape, kSplit, {s, s}, {e0, e0}, {e0, e1}), ContractError);
  CHECK_THROWS_AS(SchmidtDecomposition(shape, kSplit, {1.0, 0.0}, {e0, e1}, {e0, e1}), ContractError);
  CHECK_NOTHROW(SchmidtDecomposition(shape, kSplit, {s, s}, {e0, e1}, {e1, e0}));
}

TEST_CASE("correlation operator maps Schmidt partners and is antilinear") {
  const auto dec = schmidt_decompose(maximally_entangled_pair(), kSplit);
  const auto ua = correlation_operator(dec);
  CHECK((ua.apply(vec2(1, 0)) - vec2(1, 0)).norm() < 1e-15);
  CHECK((ua.apply(vec2(0, 1)) - vec2(0, 1)).norm() < 1e-15);
  CHECK((ua.apply(vec2(I, 0)) - vec2(-I, 0)).norm() < 1e-15);

  // coherence vector |a> goes to its complex conjugate
  const double lambda = 0.7, delta = 2.1, p = 0.6, q = 0.8;
  const CVector a = vec2(std::polar(p, lambda), std::polar(q, delta));
  CHECK((ua.apply(a) - vec2(std::polar(p, -lambda), std::polar(q, -delta))).norm() < 1e-15);
}

TEST_CASE("correlation operator maps u_k to v_k for random states") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto dec = schmidt_decompose(random_state(HilbertShape({3, 2}), rng), kSplit);
    const auto ua = correlation_operator(dec);
    for (std::size_t k = 0; k < dec.rank(); ++k) {
      CHECK((ua.apply(dec.basis_first()[k]) - dec.basis_second()[k]).norm() < 1e-12);
    }
  }
}

TEST_CASE("correlation operator does not depend on which canonical decomposition built it") {
  const auto psi = maximally_entangled_pair();
  const auto ua = correlation_operator(schmidt_decompose(psi, kSplit));
  const CVector pm[] = {vec2(s, s), vec2(s, -s)};
  const auto ub = correlation_operator(reschmidt(psi, kSplit, pm));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const CVector v = oracle::gaussian_vector(2, rng) * 1.7;
    CHECK((ua.apply(v) - ub.apply(v)).norm() < 1e-9);
  }
}

TEST_CASE("reschmidt in the plus/minus basis gives the symmetric partners") {
  const CVector pm[] = {vec2(s, s), vec2(s, -s)};
  const auto dec = reschmidt(maximally_entangled_pair(), kSplit, pm);
  CHECK((dec.basis_first()[0] - pm[0]).norm() == 0.0);
  CHECK((dec.basis_second()[0] - vec2(s, s)).norm() < 1e-15);
  CHECK((dec.basis_second()[1] - vec2(s, -s)).norm() < 1e-15);
  CHECK(std::abs(dec.coefficients()[0] - s) < 1e-15);
}

TEST_CASE("reschmidt in the circular basis gives conjugate partners") {
  const CVector pmi[] = {vec2(s, I * s), vec2(s, -I * s)};
  const auto dec = reschmidt(maximally_entangled_pair(), kSplit, pmi);
  CHECK((dec.basis_second()[0] - vec2(s, -I * s)).norm() < 1e-15);
  CHECK((dec.basis_second()[1] - vec2(s, I * s)).norm() < 1e-15);
  CHECK((dec.reconstruct().amplitudes() - maximally_entangled_pair().amplitudes()).norm() < 1e-15);
}

TEST_CASE("reschmidt with the original basis returns the original decomposition") {
  std::mt19937_64 rng(8);
  const auto psi = random_state(HilbertShape({2, 3}), rng);
  const auto dec = schmidt_decompose(psi, kSplit);
  const auto again = reschmidt(psi, kSplit, dec.basis_first());
  for (std::size_t k = 0; k < dec.rank(); ++k) {
    CHECK(std::abs(again.coefficients()[k] - dec.coefficients()[k]) < 1e-12);
    CHECK(phase_distance(again.basis_second()[k], dec.basis_second()[k]) < 1e-7);
  }
}

TEST_CASE("reschmidt rejects bases that would not be biorthogonal") {
  CVector a = CVector::Zero(4);
  a(0) = std::sqrt(0.6);
  a(3) = std::sqrt(0.4);
  const StateVector skewed(HilbertShape({2, 2}), a);
  const CVector pm[] = {vec2(s, s), vec2(s, -s)};
  CHECK_THROWS_WITH_AS(reschmidt(skewed, kSplit, pm), doctest::Contains("not EPR-type"), ContractError);

  const CVector not_orthonormal[] = {vec2(1, 0), vec2(s, s)};
  CHECK_THROWS_AS(reschmidt(maximally_entangled_pair(), kSplit, not_orthonormal), ContractError);
  const CVector too_few[] = {vec2(s, s)};
  CHECK_THROWS_AS(reschmidt(maximally_entangled_pair(), kSplit, too_few), ContractError);
}

TEST_CASE("reschmidt within a degenerate block of a larger state") {
  // weights (1/2, 1/4, 1/4): only the last two may be rotated together
  CVector a = CVector::Zero(9);
  a(0) = s;
  a(4) = 0.5;
  a(8) = 0.5;
  const StateVector psi(HilbertShape({3, 3}), a);
  CVector e0 = CVector::Zero(3), e1 = CVector::Zero(3), e2 = CVector::Zero(3);
  e0(0) = 1;
  e1(1) = s;
  e1(2) = s;
  e2(1) = s;
  e2(2) = -s;
  const CVector ok[] = {e0, e1, e2};
  const auto dec = reschmidt(psi, kSplit, ok);
  CHECK((dec.reconstruct().amplitudes() - a).norm() < 1e-14);

  CVector f0 = CVector::Zero(3), f1 = CVector::Zero(3);
  f0(0) = s;
  f0(1) = s;
  f1(0) = s;
  f1(1) = -s;
  const CVector bad[] = {f0, f1, CVector::Unit(3, 2)};
  CHECK_THROWS_AS(reschmidt(psi, kSplit, bad), ContractError);
}
