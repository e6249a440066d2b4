#include <doctest.h>

#include "nmc/errors.hpp"
#include "nmc/measures.hpp"
#include "nmc/rng.hpp"

using nmc::Distribution;

TEST_CASE("distribution validation rejects instead of renormalizing") {
  CHECK_NOTHROW(Distribution{0.25, 0.75});
  CHECK_THROWS_AS((Distribution{0.5, 0.6}), nmc::ValidationError);
  CHECK_THROWS_AS((Distribution{-0.1, 1.1}), nmc::ValidationError);
  CHECK_THROWS_AS((Distribution{std::nan(""), 1.0}), nmc::ValidationError);
  CHECK_NOTHROW(Distribution{0.5, 0.5 + 1e-13});
}

TEST_CASE("tv distance uses the sum convention") {
  CHECK(nmc::tv_distance(nmc::dirac(0, 3), nmc::dirac(2, 3)) == 2.0);
  const Distribution mu{0.5, 0.5, 0.0};
  CHECK(nmc::tv_distance(mu, mu) == 0.0);
  CHECK(nmc::tv_distance(Distribution{0.4, 0.6}, Distribution{0.6, 0.4}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(nmc::tv_distance(mu, nmc::dirac(0, 2)), nmc::DimensionError);
}

TEST_CASE("dirac and uniform") {
  const Distribution d = nmc::dirac(1, 4);
  CHECK(d[1] == 1.0);
  CHECK(d[0] == 0.0);
  CHECK_THROWS_AS(nmc::dirac(4, 4), nmc::DomainError);
  CHECK(Distribution::uniform(4)[3] == 0.25);
}

TEST_CASE("mixture") {
  const Distribution m = Distribution::mixture(nmc::dirac(0, 2), nmc::dirac(1, 2), 0.25);
  CHECK(m[0] == doctest::Approx(0.75));
  CHECK(m[1] == doctest::Approx(0.25));
}

TEST_CASE("simplex samples are valid and seed-determined") {
  nmc::Rng a(42), b(42);
  for (int i = 0; i < 200; ++i) {
    const Distribution x = nmc::sample_simplex(5, a);
    const Distribution y = nmc::sample_simplex(5, b);
    CHECK(x == y);
    CHECK(x.probs().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x.probs().minCoeff() >= 0.0);
  }
  nmc::Rng c(43);
  CHECK_FALSE(nmc::sample_simplex(5, a) == nmc::sample_simplex(5, c));
  CHECK_THROWS_AS(nmc::sample_simplex(0, a), nmc::DimensionError);
}

TEST_CASE("flat Dirichlet draws have uniform coordinate means") {
  nmc::Rng rng(3);
  const int draws = 20000;
  nmc::Vector mean = nmc::Vector::Zero(4);
  for (int i = 0; i < draws; ++i) mean += nmc::sample_simplex(4, rng).probs();
  mean /= draws;
  // Each coordinate is Beta(1, 3): mean 1/4, sd about 0.19.
  for (int j = 0; j < 4; ++j) CHECK(mean[j] == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("rng streams are reproducible") {
  nmc::Rng a(7);
  nmc::Rng b(7);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  nmc::Rng s0 = nmc::Rng::substream(7, 0);
  nmc::Rng s1 = nmc::Rng::substream(7, 1);
  CHECK(s0.next() != s1.next());
  nmc::Rng u(11);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.exponential() >= 0.0);
  }
}
