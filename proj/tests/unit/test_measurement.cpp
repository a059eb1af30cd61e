#include <doctest.h>

#include <cmath>
#include <random>

#include "erasure_lab/coherence.hpp"
#include "erasure_lab/measurement.hpp"
#include "oracles.hpp"

using namespace erasure_lab;

namespace {

const double s = std::sqrt(0.5);
const Bipartition kSplit{{0}};

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

std::vector<CVector> columns(const CMatrix& m) {
  std::vector<CVector> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m.col(c));
  return out;
}

}  // namespace

TEST_CASE("which-way marking yields the correlated pair") {
  const auto phi = mark_which_way(s, s);
  CHECK((phi.amplitudes() - maximally_entangled_pair().amplitudes()).norm() < 1e-15);

  const auto skew = mark_which_way(0.6, 0.8);
  const std::size_t keep_ii[] = {1};
  const auto rho = partial_trace(skew, keep_ii).matrix();
  CHECK(std::abs(rho(0, 0) - 0.36) < 1e-15);
  CHECK(std::abs(rho(1, 1) - 0.64) < 1e-15);
  CHECK(rho(0, 1) == Complex(0.0));

  CHECK_THROWS_AS(mark_which_way(0.0, 1.0), ContractError);
  CHECK_THROWS_AS(mark_which_way(1.0, 0.0), ContractError);
  CHECK_THROWS_AS(mark_which_way(0.5, 0.5), ContractError);
}

TEST_CASE("measuring I in the which-way basis collapses II to the same label") {
  const CVector basis[] = {vec2(1, 0), vec2(0, 1)};
  const auto out = distant_measure(maximally_entangled_pair(), kSplit, basis);
  REQUIRE(out.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(out[k].probability - 0.5) < 1e-15);
    CHECK((out[k].post_state->amplitudes() - basis[k]).norm() < 1e-15);
  }
}

TEST_CASE("measuring I in the plus/minus basis leaves II in the matching coherence state") {
  const CVector basis[] = {vec2(s, s), vec2(s, -s)};
  const auto out = distant_measure(maximally_entangled_pair(), kSplit, basis);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(out[k].probability - 0.5) < 1e-15);
    CHECK((out[k].post_state->amplitudes() - basis[k]).norm() < 1e-15);
  }
}

TEST_CASE("a product state shows no distant effect") {
  std::mt19937_64 rng(1);
  const auto phi = random_state(HilbertShape({3}), rng);
  const auto prod = tensor(StateVector::basis(2, 0), phi);
  const auto out = distant_measure(prod, kSplit, columns(random_unitary(2, rng).matrix()));
  for (const auto& o : out) {
    if (!o.post_state) continue;
    CHECK(std::abs(std::abs(o.post_state->inner(phi)) - 1.0) < 1e-12);
  }
}

TEST_CASE("outcome ensembles reproduce the reduced state") {
  std::mt19937_64 rng(44);
  const std::size_t keep_ii[] = {1};
  for (int t = 0; t < 100; ++t) {
    const std::size_t d1 = 2 + static_cast<std::size_t>(t % 2);
    const auto psi = random_state(HilbertShape({d1, 3}), rng);
    const auto basis = columns(random_unitary(d1, rng).matrix());
    const auto out = distant_measure(psi, kSplit, basis);
    double total = 0.0;
    for (const auto& o : out) total += o.probability;
    CHECK(std::abs(total - 1.0) < 1e-12);
    const auto ens = outcome_ensemble(out);
    CHECK(oracle::max_abs(CMatrix(ens.matrix() - partial_trace(psi, keep_ii).matrix())) < 1e-10);
  }
}

TEST_CASE("distant_measure rejects bad bases") {
  const CVector partial[] = {vec2(1, 0)};
  CHECK_THROWS_AS(distant_measure(maximally_entangled_pair(), kSplit, partial), ContractError);
  // incomplete is fine when it still covers the support
  const auto prod = tensor(StateVector::basis(2, 0), StateVector::basis(2, 1));
  CHECK(distant_measure(prod, kSplit, partial).size() == 1);
  const CVector skewed[] = {vec2(1, 0), vec2(s, s)};
  CHECK_THROWS_AS(distant_measure(maximally_entangled_pair(), kSplit, skewed), ContractError);
  const CVector wrong_dim[] = {CVector::Unit(3, 0)};
  CHECK_THROWS_AS(distant_measure(maximally_entangled_pair(), kSplit, wrong_dim), ContractError);
}

TEST_CASE("controlled shift: permutation route equals the dense unitary") {
  std::mt19937_64 rng(2);
  const HilbertShape shape({3, 2, 4});
  const auto psi = random_state(shape, rng);
  const std::size_t shifts3[] = {1, 3, 0};
  const std::size_t shifts2[] = {2, 1};
  const std::size_t ct[] = {0, 2};
  CHECK((apply_controlled_shift(psi, 0, 2, shifts3).amplitudes() -
         apply_unitary(psi, controlled_shift_unitary(3, 4, shifts3), ct).amplitudes())
            .norm() < 1e-14);
  const std::size_t tc[] = {1, 0};
  CHECK((apply_controlled_shift(psi, 1, 0, shifts2).amplitudes() -
         apply_unitary(psi, controlled_shift_unitary(2, 3, shifts2), tc).amplitudes())
            .norm() < 1e-14);
  CHECK_THROWS_AS(apply_controlled_shift(psi, 0, 0, shifts3), ContractError);
  CHECK_THROWS_AS(apply_controlled_shift(psi, 0, 2, shifts2), ContractError);
}

TEST_CASE("coupling with the identity is plain tensoring") {
  const auto det = StateVector::basis(3, 0);
  const std::size_t targets[] = {1, 2};
  const auto out = couple_detector(maximally_entangled_pair(), det, UnitaryOperator::identity(6), targets);
  CHECK((out.amplitudes() - tensor(maximally_entangled_pair(), det).amplitudes()).norm() < 1e-15);
}

TEST_CASE("coupling a detector to II keeps the I-side Schmidt structure") {
  std::mt19937_64 rng(15);
  const std::size_t targets[] = {1, 2};
  for (int t = 0; t < 20; ++t) {
    const auto psi = random_state(HilbertShape({2, 2}), rng);
    const auto u = random_unitary(6, rng);
    const auto coupled = couple_detector(psi, StateVector::basis(3, 0), u, targets);
    const auto before = schmidt_decompose(psi, kSplit);
    const auto after = schmidt_decompose(coupled, kSplit);
    REQUIRE(after.rank() == before.rank());
    for (std::size_t k = 0; k < before.rank(); ++k) {
      CHECK(std::abs(after.coefficients()[k] - before.coefficients()[k]) < 1e-10);
    }
    const auto epr = couple_detector(maximally_entangled_pair(), StateVector::basis(3, 0), u, targets);
    CHECK(is_epr_type(schmidt_decompose(epr, kSplit)));
  }
}

TEST_CASE("marking unitary records the slit and acts linearly on coherent input") {
  const auto mark = marking_unitary(2);
  const std::size_t both[] = {0, 1};
  const auto r1 = apply_unitary(tensor(StateVector::basis(2, 0), StateVector::basis(3, 0)), mark, both);
  const auto r2 = apply_unitary(tensor(StateVector::basis(2, 1), StateVector::basis(3, 0)), mark, both);
  CHECK(std::abs(r1[1] - 1.0) < 1e-15);  // |1>|1>
  CHECK(std::abs(r2[5] - 1.0) < 1e-15);  // |2>|2>

  const Complex alpha(0.6, 0.0), beta(0.0, 0.8);
  const auto coherent = tensor(StateVector(HilbertShape({2}), vec2(alpha, beta)), StateVector::basis(3, 0));
  const auto rc = apply_unitary(coherent, mark, both);
  CHECK((rc.amplitudes() - (alpha * r1.amplitudes() + beta * r2.amplitudes())).norm() < 1e-12);
}

TEST_CASE("unitary coupling preserves orthogonality") {
  std::mt19937_64 rng(3);
  const auto u = random_unitary(6, rng);
  const std::size_t both[] = {0, 1};
  const auto basis = columns(random_unitary(2, rng).matrix());
  const auto x = apply_unitary(tensor(StateVector(HilbertShape({2}), basis[0]), StateVector::basis(3, 0)), u, both);
  const auto y = apply_unitary(tensor(StateVector(HilbertShape({2}), basis[1]), StateVector::basis(3, 0)), u, both);
  CHECK(std::abs(x.inner(y)) < 1e-12);
}

TEST_CASE("independent side evolutions keep the cut's Schmidt coefficients") {
  std::mt19937_64 rng(77);
  const auto psi = random_state(HilbertShape({3, 2, 2, 2}), rng);
  const Bipartition cut{{0, 1}};
  const auto before = schmidt_decompose(psi, cut);
  const std::size_t left[] = {0, 1};
  const std::size_t right[] = {2, 3};
  const auto evolved = apply_unitary(apply_unitary(psi, random_unitary(6, rng), left), random_unitary(4, rng), right);
  const auto after = schmidt_decompose(evolved, cut);
  REQUIRE(after.rank() == before.rank());
  for (std::size_t k = 0; k < before.rank(); ++k) {
    CHECK(std::abs(after.coefficients()[k] - before.coefficients()[k]) < 1e-10);
  }
}

TEST_CASE("cut comparison: product state, dropped branch, complete branches") {
  std::mt19937_64 rng(5);
  const auto phi = random_state(HilbertShape({2}), rng);
  const auto prod = tensor(StateVector::basis(2, 0), phi);
  const std::size_t keep_ii[] = {1};
  const std::size_t keep0[] = {0};
  const Branch single[] = {{1.0, phi}};
  const auto r0 = cut_compare(prod, keep_ii, single, keep0);
  CHECK(r0.distance < 1e-15);
  CHECK(r0.complete);

  const Branch dropped[] = {{0.5, StateVector::basis(2, 0)}};
  const auto r1 = cut_compare(maximally_entangled_pair(), keep_ii, dropped, keep0);
  // ½‖diag(1/2, 1/2) − diag(1, 0)‖₁ by hand
  CHECK(std::abs(r1.distance - 0.5) < 1e-15);
  CHECK_FALSE(r1.complete);
  CHECK(std::abs(r1.total_weight - 0.5) < 1e-15);

  const CVector pm[] = {vec2(s, s), vec2(s, -s)};
  const auto branches = branches_from(distant_measure(maximally_entangled_pair(), kSplit, pm));
  const auto r2 = cut_compare(maximally_entangled_pair(), keep_ii, branches, keep0);
  CHECK(r2.distance < 1e-15);
  CHECK(r2.complete);
}

TEST_CASE("erasure cut is invisible to II for any local evolutions") {
  std::mt19937_64 rng(100);
  CHECK(simple_erasure_cut(UnitaryOperator::identity(6), UnitaryOperator::identity(4)).distance < 1e-12);
  for (int t = 0; t < 10; ++t) {
    const auto r = simple_erasure_cut(random_unitary(6, rng), random_unitary(4, rng));
    CHECK(r.complete);
    CHECK(r.distance < 1e-10);
  }
  CHECK_THROWS_AS(simple_erasure_cut(UnitaryOperator::identity(4), UnitaryOperator::identity(4)), ContractError);
}
