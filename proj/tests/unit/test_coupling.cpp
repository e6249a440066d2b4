#include <doctest.h>

#include "nmc/coupling.hpp"
#include "nmc/errors.hpp"
#include "nmc/examples.hpp"
#include "nmc/rng.hpp"

using nmc::Distribution;
using nmc::Rational;
using nmc::StochasticMatrix;

namespace {

StochasticMatrix ex1_base() { return StochasticMatrix(nmc::to_double(nmc::examples::example1_base_exact())); }
StochasticMatrix ex2_base() { return StochasticMatrix(nmc::to_double(nmc::examples::example2_base_exact())); }

// Uncoupled mass by pushing the joint law of the residual pair forward one
// coupling step at a time, using only residual_densities.
std::vector<double> pushed_uncoupled_mass(const StochasticMatrix& base, std::size_t x1, std::size_t x2,
                                          std::size_t n_max) {
  const std::size_t n = base.size();
  nmc::Matrix mass = nmc::Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  mass(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(x2)) = 1.0;
  std::vector<double> out{mass.sum()};
  for (std::size_t k = 1; k <= n_max; ++k) {
    nmc::Matrix next = nmc::Matrix::Zero(mass.rows(), mass.cols());
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const double w = mass(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (w == 0.0 || a == b) continue;
        const nmc::CouplingStep st = nmc::residual_densities(base, a, b);
        next += w * (1.0 - st.kappa) * (st.phi1.probs() * st.phi2.probs().transpose());
      }
    mass = next;
    out.push_back(mass.sum());
  }
  return out;
}

}  // namespace

TEST_CASE("pair index is row-major over off-diagonal pairs") {
  const nmc::PairIndex idx(4);
  CHECK(idx.size() == 12);
  CHECK(idx.index(0, 1) == 0);
  CHECK(idx.index(0, 3) == 2);
  CHECK(idx.index(1, 0) == 3);
  CHECK(idx.index(3, 2) == 11);
  for (std::size_t z = 0; z < idx.size(); ++z) {
    const auto [a, b] = idx.pair(z);
    CHECK(a != b);
    CHECK(idx.index(a, b) == z);
  }
  CHECK_THROWS_AS(idx.index(2, 2), nmc::DomainError);
  CHECK_THROWS_AS(idx.pair(12), nmc::DomainError);
  CHECK(nmc::PairIndex(1).size() == 0);
}

TEST_CASE("residual densities reassemble the rows") {
  const StochasticMatrix b = ex2_base();
  for (std::size_t x1 = 0; x1 < 6; ++x1)
    for (std::size_t x2 = 0; x2 < 6; ++x2) {
      const nmc::CouplingStep st = nmc::residual_densities(b, x1, x2);
      const nmc::Vector r1 = st.kappa * st.phi3.probs() + (1.0 - st.kappa) * st.phi1.probs();
      const nmc::Vector r2 = st.kappa * st.phi3.probs() + (1.0 - st.kappa) * st.phi2.probs();
      CHECK((r1 - b.row(x1).probs()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((r2 - b.row(x2).probs()).cwiseAbs().maxCoeff() < 1e-15);
      if (x1 != x2) {
        CHECK(st.degenerate == nmc::Degeneracy::none);
        CHECK(st.phi1.probs().cwiseProduct(st.phi2.probs()).maxCoeff() == 0.0);
      }
    }
}

TEST_CASE("degenerate overlaps") {
  nmc::Matrix m(3, 3);
  m << 1, 0, 0, 0, 1, 0, 0.5, 0.5, 0;
  const StochasticMatrix b(m);
  const auto disjoint = nmc::residual_densities(b, 0, 1);
  CHECK(disjoint.degenerate == nmc::Degeneracy::kappa_zero);
  CHECK(disjoint.kappa == 0.0);
  CHECK(disjoint.phi3 == nmc::dirac(0, 3));
  const auto same = nmc::residual_densities(b, 2, 2);
  CHECK(same.degenerate == nmc::Degeneracy::kappa_one);
  CHECK(same.kappa == 1.0);
  CHECK(same.phi1 == b.row(2));
  CHECK(same.phi2 == b.row(2));

  const auto near = nmc::initial_coupling(Distribution{0.5, 0.5}, Distribution{0.5 + 1e-14, 0.5 - 1e-14});
  CHECK(near.degenerate == nmc::Degeneracy::kappa_one);
  CHECK(near.kappa == 1.0);
  CHECK_THROWS_AS(nmc::initial_coupling(Distribution{1.0}, Distribution{0.5, 0.5}), nmc::DimensionError);
}

TEST_CASE("pair operator of example 1 matches the reference exactly") {
  const nmc::RationalMatrix v = nmc::build_v_hat_exact(nmc::examples::example1_base_exact());
  const nmc::RationalMatrix ref = nmc::examples::example1_v_hat_reference();
  REQUIRE(v.rows() == 12);
  REQUIRE(v.cols() == 12);
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) CHECK_MESSAGE(v(i, j) == ref(i, j), "entry " << i << "," << j);

  const nmc::CouplingOperator op = nmc::build_v_hat(ex1_base());
  CHECK((op.v_hat - nmc::to_double(ref)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(op.survival[0] == doctest::Approx(0.2));
  CHECK(op.residual_transition.rows() == 12);
  CHECK(op.residual_transition.cols() == 16);

  nmc::RationalMatrix not_stochastic = nmc::examples::example1_base_exact();
  not_stochastic(0, 0) = Rational(1, 2);
  CHECK_THROWS_AS(nmc::build_v_hat_exact(not_stochastic), nmc::ValidationError);
}

TEST_CASE("pair operator row sums equal survival times next survival weight") {
  const nmc::CouplingOperator op = nmc::build_v_hat(ex2_base());
  REQUIRE(op.v_hat.rows() == 30);
  // Row z of V sums to (1 - kappa(z)) because the residual pair never lands on the diagonal.
  for (Eigen::Index z = 0; z < 30; ++z) CHECK(op.v_hat.row(z).sum() == doctest::Approx(op.survival[z]));
}

TEST_CASE("exact uncoupled mass") {
  const StochasticMatrix b = ex1_base();
  const Distribution d0 = nmc::dirac(0, 4), d1 = nmc::dirac(1, 4);
  CHECK(nmc::uncoupled_probability_exact(b, d0, d1, 0) == 1.0);
  CHECK(nmc::uncoupled_probability_exact(b, d0, d1, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(nmc::uncoupled_probability_exact(b, d0, d0, 3) == 0.0);

  // Cross-check n = 5 and n = 10 against powers of the exact operator.
  const nmc::RationalMatrix v = nmc::build_v_hat_exact(nmc::examples::example1_base_exact());
  nmc::RationalMatrix w(12, 1);
  for (Eigen::Index z = 0; z < 12; ++z) {
    Rational s = 0;
    for (Eigen::Index j = 0; j < 12; ++j) s += v(z, j);
    w(z, 0) = s;
  }
  for (std::size_t n = 2; n <= 10; ++n) {
    w = v * w;
    if (n == 5 || n == 10)
      CHECK(nmc::uncoupled_probability_exact(b, d0, d1, n) == doctest::Approx(w(0, 0).to_double()).epsilon(1e-12));
  }
  CHECK(nmc::uncoupled_probability_exact(b, d0, d1, 5) == doctest::Approx(0.00276).epsilon(1e-9));
  CHECK(nmc::uncoupled_probability_exact(b, d0, d1, 10) == doctest::Approx(1.71876e-5).epsilon(1e-5));
}

TEST_CASE("uncoupled curve agrees with forward pushing of the pair law") {
  for (const auto& b : {ex1_base(), ex2_base()}) {
    const nmc::CouplingOperator op = nmc::build_v_hat(b);
    const std::size_t n = b.size();
    for (std::size_t x1 = 0; x1 < n; ++x1)
      for (std::size_t x2 = 0; x2 < n; ++x2) {
        if (x1 == x2) continue;
        const auto curve = nmc::uncoupled_curve(op, nmc::dirac(x1, n), nmc::dirac(x2, n), 8);
        const auto pushed = pushed_uncoupled_mass(b, x1, x2, 8);
        for (std::size_t k = 0; k <= 8; ++k) CHECK(curve[k] == doctest::Approx(pushed[k]).epsilon(1e-12));
      }
  }
}

TEST_CASE("worst case curve is the maximum over Dirac pairs") {
  const StochasticMatrix b = ex1_base();
  const nmc::CouplingOperator op = nmc::build_v_hat(b);
  const auto worst = nmc::worst_case_uncoupled_curve(op, 6);
  for (std::size_t k = 1; k <= 6; ++k) {
    double best = 0.0;
    for (std::size_t x1 = 0; x1 < 4; ++x1)
      for (std::size_t x2 = 0; x2 < 4; ++x2)
        if (x1 != x2)
          best = std::max(best, nmc::uncoupled_probability_exact(b, nmc::dirac(x1, 4), nmc::dirac(x2, 4), k));
    CHECK(worst[k] == doctest::Approx(best).epsilon(1e-14));
  }
}

TEST_CASE("coupling inequality for the linear chain") {
  for (const auto& b : {ex1_base(), ex2_base()}) {
    const std::size_t n = b.size();
    const nmc::CouplingOperator op = nmc::build_v_hat(b);
    nmc::Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const Distribution mu = nmc::sample_simplex(n, rng), nu = nmc::sample_simplex(n, rng);
      const auto curve = nmc::uncoupled_curve(op, mu, nu, 12);
      nmc::Vector a = mu.probs(), c = nu.probs();
      for (std::size_t k = 0; k <= 12; ++k) {
        CHECK((a - c).cwiseAbs().sum() <= 2.0 * curve[k] + 1e-14);
        a = b.matrix().transpose() * a;
        c = b.matrix().transpose() * c;
      }
    }
  }
}

TEST_CASE("exact marginal laws are the linear laws") {
  const StochasticMatrix b = ex1_base();
  nmc::Rng rng(8);
  const Distribution mu = nmc::sample_simplex(4, rng), nu = nmc::sample_simplex(4, rng);
  nmc::Vector a = mu.probs(), c = nu.probs();
  for (std::size_t k = 0; k <= 6; ++k) {
    CHECK((nmc::marginal_law_exact(b, mu, nu, k, 1).probs() - a).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((nmc::marginal_law_exact(b, mu, nu, k, 2).probs() - c).cwiseAbs().maxCoeff() < 1e-14);
    a = b.matrix().transpose() * a;
    c = b.matrix().transpose() * c;
  }
  CHECK_THROWS_AS(nmc::marginal_law_exact(b, mu, nu, 1, 3), nmc::DomainError);
}

TEST_CASE("simulation is seed-determined and consistent") {
  const StochasticMatrix b = ex1_base();
  const Distribution d0 = nmc::dirac(0, 4), d1 = nmc::dirac(1, 4);
  const auto s1 = nmc::simulate_coupled(b, d0, d1, 3, 20000, 7, 2);
  const auto s2 = nmc::simulate_coupled(b, d0, d1, 3, 20000, 7, 2);
  CHECK(s1.uncoupled_frequency == s2.uncoupled_frequency);
  CHECK(s1.marginal1 == s2.marginal1);
  CHECK(s1.uncoupled_frequency[0] == 1.0);
  for (std::size_t k = 1; k <= 3; ++k) {
    const double exact = nmc::uncoupled_probability_exact(b, d0, d1, k);
    CHECK(std::abs(s1.uncoupled_frequency[k] - exact) <= 4.0 * s1.standard_error(exact) + 1e-12);
    // Observables differ only while uncoupled.
    CHECK(s1.mismatch_frequency[k] <= s1.uncoupled_frequency[k]);
  }
  const nmc::Vector law = nmc::marginal_law_exact(b, d0, d1, 3, 1).probs();
  for (Eigen::Index y = 0; y < 4; ++y)
    CHECK(std::abs(s1.marginal1.probs()[y] - law[y]) <= 4.0 * s1.standard_error(law[y]) + 1e-12);

  const auto same = nmc::simulate_coupled(b, d0, d0, 4, 1000, 1);
  for (double f : same.uncoupled_frequency) CHECK(f == 0.0);
  CHECK_THROWS_AS(nmc::simulate_coupled(b, d0, nmc::dirac(0, 3), 1, 10, 1), nmc::DimensionError);
  CHECK_THROWS_AS(nmc::simulate_coupled(b, d0, d1, 1, 0, 1), nmc::DomainError);
}
