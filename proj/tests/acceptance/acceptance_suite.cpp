// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "nmc/cli/commands.hpp"
#include "nmc/cli/spec_file.hpp"
#include "nmc/coefficients.hpp"
#include "nmc/convergence.hpp"
#include "nmc/coupling.hpp"
#include "nmc/examples.hpp"
#include "nmc/spectral.hpp"

using namespace nmc;

namespace {

const std::string kData = NMC_DATA_DIR;
const std::string kTestData = NMC_TEST_DATA_DIR;

struct Outcome {
  bool ok = true;
  std::string detail;

  // Keeps the first failure message.
  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0 means no limit
  std::function<Outcome()> body;
};

std::string rat(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

StochasticMatrix ex1_base() { return examples::example1_spec(0.1).base(); }
StochasticMatrix ex2_base() { return examples::example2_spec(0.1).base(); }

// Law of the linear chain after n steps.
Distribution push(const StochasticMatrix& p, const Distribution& mu, std::size_t n) {
  Vector v = mu.probs();
  for (std::size_t k = 0; k < n; ++k) v = (v.transpose() * p.matrix()).transpose();
  return Distribution(v);
}

// Greedy multiset match: every expected value pairs with a distinct computed one.
bool multiset_match(const std::vector<std::complex<double>>& expected,
                    const std::vector<std::complex<double>>& got, double tol, std::string& why) {
  if (expected.size() != got.size()) {
    why = "expected " + std::to_string(expected.size()) + " eigenvalues, got " + std::to_string(got.size());
    return false;
  }
  std::vector<bool> used(got.size(), false);
  for (const auto& e : expected) {
    std::size_t best = got.size();
    for (std::size_t i = 0; i < got.size(); ++i)
      if (!used[i] && std::abs(got[i] - e) <= tol && (best == got.size() || std::abs(got[i] - e) < std::abs(got[best] - e)))
        best = i;
    if (best == got.size()) {
      why = "no computed eigenvalue within " + num(tol) + " of " + num(e.real()) + (e.imag() >= 0 ? "+" : "") +
            num(e.imag()) + "i";
      return false;
    }
    used[best] = true;
  }
  return true;
}

Outcome criterion1() {
  Outcome o;
  const auto loaded = cli::load_spec_file(kData + "/example1.json");
  const RationalMatrix v = build_v_hat_exact(loaded.exact_base);
  const RationalMatrix ref = examples::example1_v_hat_reference();
  o.require(v.rows() == 12 && v.cols() == 12, "shape " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
  if (!o.ok) return o;
  const std::set<Rational> allowed{Rational(0), Rational(1, 10), Rational(1, 5), Rational(1, 15),
                                   Rational(1, 30), Rational(2, 15), Rational(3, 10)};
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) {
      o.require(v(i, j) == ref(i, j), "entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                          rat(v(i, j)) + ", reference " + rat(ref(i, j)));
      o.require(allowed.count(v(i, j)) == 1, "entry " + rat(v(i, j)) + " outside the reference value set");
      nonzero += v(i, j) != Rational(0);
    }
  if (o.ok) o.detail = "12x12, " + std::to_string(nonzero) + " nonzero entries identical as rationals";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto op = build_v_hat(ex1_base());
  const double s = std::sqrt(5.0) / 20.0;
  const std::vector<std::complex<double>> expected{0.25 + s, 0.25 + s, 0.25 - s, 0.25 - s, 0.1, 0.1,
                                                   0.2, 0.2, 0.2, 0.2, 2.0 / 15.0, 2.0 / 15.0};
  const SpectrumResult spec = eigenvalues(op.v_hat);
  std::string why;
  o.require(multiset_match(expected, spec.eigenvalues, 1e-9, why), why);
  const double r = spectral_radius(op.v_hat).radius;
  o.require(std::abs(r - (0.25 + s)) <= 1e-9, "r = " + num(r) + ", expected " + num(0.25 + s));
  if (o.ok) o.detail = "12 eigenvalues matched, |r - (1/4 + sqrt5/20)| = " + num(std::abs(r - 0.25 - s));
  return o;
}

Outcome comparison_table(const RationalMatrix& exact_base, const StochasticMatrix& base,
                         const examples::ReferenceValues& ref, double r) {
  Outcome o;
  for (std::size_t k = 1; k <= 5; ++k) {
    const double a = md_alpha_linear_exact(exact_base, k).to_double();
    o.require(std::abs((1.0 - a) - ref.one_minus_alpha[k - 1]) <= 1e-12,
              "1 - alpha_" + std::to_string(k) + " = " + num(1.0 - a) + ", expected " + num(ref.one_minus_alpha[k - 1]));
    const double ad = md_alpha_linear(base, k).value;
    o.require(std::abs(ad - a) <= 1e-12, "floating alpha_" + std::to_string(k) + " disagrees with exact value");
    o.require(std::pow(r, static_cast<double>(k)) < 1.0 - a,
              "r^" + std::to_string(k) + " = " + num(std::pow(r, static_cast<double>(k))) + " not below " + num(1.0 - a));
  }
  return o;
}

Outcome criterion3() {
  const auto& ref = examples::example1_reference();
  const double r = spectral_radius(build_v_hat(ex1_base()).v_hat).radius;
  Outcome o = comparison_table(examples::example1_base_exact(), ex1_base(), ref, r);
  if (o.ok) o.detail = "1 - alpha_k exact for k = 1..5 and r^k < 1 - alpha_k for all five";
  return o;
}

Outcome criterion4() {
  const auto& ref = examples::example2_reference();
  const auto op = build_v_hat(ex2_base());
  Outcome o;
  o.require(op.v_hat.rows() == 30 && op.v_hat.cols() == 30, "V has " + std::to_string(op.v_hat.rows()) + " rows");
  if (!o.ok) return o;
  const double r = spectral_radius(op.v_hat).radius;
  o.require(std::abs(r - 0.3732) <= 5e-5, "r = " + num(r));
  const Outcome table = comparison_table(examples::example2_base_exact(), ex2_base(), ref, r);
  o.require(table.ok, table.detail);
  const auto spec = examples::example2_spec(0.1);
  const double alpha = md_alpha_nonlinear(spec, 1, {}).value;
  const double lambda = lipschitz_lambda(spec).value;
  o.require(std::abs(alpha - 0.6) <= 1e-12, "nonlinear alpha = " + num(alpha));
  o.require(std::abs(lambda - 0.1) <= 1e-12, "lambda = " + num(lambda) + ", kappa = 0.1");
  if (o.ok) o.detail = "30x30, r = " + num(r) + ", table and strict inequalities hold, alpha = 0.6, lambda = kappa";
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto base = ex1_base();
  double worst = 0.0;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t n = 0; n <= 10; ++n)
        for (int which : {1, 2}) {
          const Distribution start = dirac(which == 1 ? x : y, 4);
          const Distribution got = marginal_law_exact(base, dirac(x, 4), dirac(y, 4), n, which);
          const double err = (got.probs() - push(base, start, n).probs()).cwiseAbs().maxCoeff();
          worst = std::max(worst, err);
          o.require(err <= 1e-12, "pair (" + std::to_string(x) + "," + std::to_string(y) + "), n = " +
                                      std::to_string(n) + ", observable " + std::to_string(which) + ": error " + num(err));
        }
  if (o.ok) o.detail = "16 ordered pairs, n = 0..10, max entry error " + num(worst);
  return o;
}

using Q = mpq_class;
using QMatrix = std::vector<std::vector<Q>>;

QMatrix to_q(const RationalMatrix& m) {
  QMatrix q(static_cast<std::size_t>(m.rows()), std::vector<Q>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Rational& r = m(i, j);
      q[i][j] = Q(mpz_class(std::to_string(r.num())), mpz_class(std::to_string(r.den())));
      q[i][j].canonicalize();
    }
  return q;
}

// Exact check in GMP rationals, independent of the library's coupling code:
// the uncoupled probability of the Dirac pair z at step n >= 1 is
// (V^(n-1) s)(z), with V(z, z') = s(z) phi1(y1) phi2(y2) and s = 1 - overlap.
// The library's floating values must agree with the exact ones.
Outcome tv_vs_uncoupled(const RationalMatrix& exact_base, const std::string& name, std::size_t& ties) {
  Outcome o;
  const QMatrix p = to_q(exact_base);
  const std::size_t n_states = p.size();
  const StochasticMatrix base(to_double(exact_base));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n_states; ++a)
    for (std::size_t b = 0; b < n_states; ++b)
      if (a != b) pairs.emplace_back(a, b);
  const std::size_t m = pairs.size();
  std::vector<Q> s(m);
  QMatrix v(m, std::vector<Q>(m));
  for (std::size_t z = 0; z < m; ++z) {
    const auto [a, b] = pairs[z];
    Q overlap = 0;
    for (std::size_t j = 0; j < n_states; ++j) overlap += p[a][j] < p[b][j] ? p[a][j] : p[b][j];
    s[z] = 1 - overlap;
    if (s[z] == 0) continue;
    for (std::size_t w = 0; w < m; ++w) {
      const auto [y1, y2] = pairs[w];
      const Q phi1 = p[a][y1] - (p[a][y1] < p[b][y1] ? p[a][y1] : p[b][y1]);
      const Q phi2 = p[b][y2] - (p[a][y2] < p[b][y2] ? p[a][y2] : p[b][y2]);
      v[z][w] = phi1 * phi2 / s[z];
    }
  }
  QMatrix power(n_states, std::vector<Q>(n_states));  // P^n
  for (std::size_t i = 0; i < n_states; ++i) power[i][i] = 1;
  std::vector<Q> u = s;  // V^(n-1) s
  for (std::size_t n = 0; n <= 30; ++n) {
    for (std::size_t z = 0; z < m && o.ok; ++z) {
      const auto [a, b] = pairs[z];
      Q tv = 0;
      for (std::size_t j = 0; j < n_states; ++j) tv += abs(power[a][j] - power[b][j]);
      const Q unc = n == 0 ? Q(1) : u[z];
      o.require(tv <= 2 * unc, name + ": tv > 2 P(uncoupled) at n = " + std::to_string(n) + ", pair (" +
                                   std::to_string(a) + "," + std::to_string(b) + ")");
      ties += tv == 2 * unc;
      const double lib = uncoupled_probability_exact(base, dirac(a, n_states), dirac(b, n_states), n);
      o.require(std::abs(lib - unc.get_d()) <= 1e-12, name + ": uncoupled_probability_exact = " + num(lib) +
                                                           ", exact " + num(unc.get_d()) + " at n = " + std::to_string(n));
    }
    if (n >= 1) {
      std::vector<Q> next(m);
      for (std::size_t z = 0; z < m; ++z)
        for (std::size_t w = 0; w < m; ++w) next[z] += v[z][w] * u[w];
      u = std::move(next);
    }
    QMatrix next(n_states, std::vector<Q>(n_states));
    for (std::size_t i = 0; i < n_states; ++i)
      for (std::size_t k = 0; k < n_states; ++k)
        for (std::size_t j = 0; j < n_states; ++j) next[i][j] += power[i][k] * p[k][j];
    power = std::move(next);
  }
  const auto op = build_v_hat(base);
  const double r = spectral_radius(op.v_hat).radius;
  const double g = gelfand_sequence(op.v_hat, 64).back();
  o.require(std::abs(g - r) <= 0.02, name + ": Gelfand estimate " + num(g) + " vs r = " + num(r));
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::size_t ties = 0;
  const Outcome a = tv_vs_uncoupled(examples::example1_base_exact(), "example 1", ties);
  o.require(a.ok, a.detail);
  const Outcome b = tv_vs_uncoupled(examples::example2_base_exact(), "example 2", ties);
  o.require(b.ok, b.detail);
  if (o.ok)
    o.detail = "exact rational check, all ordered Dirac pairs, n = 0..30 (" + std::to_string(ties) +
               " cases with equality); Gelfand(64) within 0.02";
  return o;
}

Outcome criterion7() {
  Outcome o;
  double worst = 0.0;
  for (double kappa : {0.05, 0.1}) {
    const auto spec = examples::example1_spec(kappa);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto est = lipschitz_lambda_k_estimate(spec, k, {500, 2024});
      const double bound = c_k_closed_form_bound(k) * kappa;
      worst = std::max(worst, est.value / bound);
      o.require(est.value <= bound, "kappa = " + num(kappa) + ", k = " + std::to_string(k) + ": " + num(est.value) +
                                        " > " + num(bound));
    }
  }
  if (o.ok) o.detail = "largest sampled ratio / bound = " + num(worst);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto spec = examples::example1_spec(0.01);
  const auto report = verify_main_bound(spec, 0.05, dirac(0, 4), dirac(1, 4), 50, {});
  o.require(report.n_delta.has_value(), "surrogate n_delta not found");
  if (!o.ok) return o;
  const std::size_t onset = *report.n_delta;
  const double rd = report.radius + 0.05;
  const auto traj = flow(spec, dirac(0, 4), 50);
  const auto traj2 = flow(spec, dirac(1, 4), 50);
  for (const auto& b : report.bound_checks) {
    if (b.n < onset) continue;
    const double bound = 2.0 * report.big_c * std::pow(rd, static_cast<double>(b.n));
    o.require(std::abs(bound - b.bound_value) <= 1e-12 * bound, "bound value mismatch at n = " + std::to_string(b.n));
    o.require(b.tv_exact <= bound, "tv " + num(b.tv_exact) + " > " + num(bound) + " at n = " + std::to_string(b.n));
    // Independent tv from the two flows, where cancellation leaves it resolved.
    const double direct = tv_distance(traj[b.n], traj2[b.n]);
    o.require(std::abs(direct - b.tv_exact) <= 1e-12, "tv_decay disagrees with flow difference at n = " +
                                                          std::to_string(b.n));
  }
  o.require(report.bounds_hold, "report flags a bound violation");
  o.require(report.bound_checks.size() == 51, "expected checks for n = 0..50");
  if (o.ok)
    o.detail = "n_delta = " + std::to_string(onset) + ", C = " + num(report.big_c) + ", r + delta = " + num(rd) +
               "; bounds hold for n_delta <= n <= 50";
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto base = ex1_base();
  const Distribution mu = dirac(0, 4), nu = dirac(2, 4);
  const auto sim = simulate_coupled(base, mu, nu, 10, 100000, 77, 4);
  double worst = 0.0;
  for (std::size_t n : {1u, 5u, 10u}) {
    const double exact = uncoupled_probability_exact(base, mu, nu, n);
    const double se = sim.standard_error(exact);
    const double dev = std::abs(sim.uncoupled_frequency[n] - exact);
    const double z = se > 0 ? dev / se : (dev == 0 ? 0 : INFINITY);
    worst = std::max(worst, z);
    o.require(z <= 4.0, "n = " + std::to_string(n) + ": frequency " + num(sim.uncoupled_frequency[n]) + " vs exact " +
                            num(exact) + " (" + num(z) + " sigma)");
  }
  const auto again = simulate_coupled(base, mu, nu, 10, 100000, 77, 4);
  o.require((again.uncoupled_frequency == sim.uncoupled_frequency &&
                             again.mismatch_frequency == sim.mismatch_frequency &&
                             again.marginal1 == sim.marginal1 && again.marginal2 == sim.marginal2),
            "rerun with the same seed differs");
  std::ostringstream o1, o2, e;
  const std::vector<std::string> args{"couple", kData + "/example1.json", "--n", "10", "--trials", "100000",
                                      "--seed", "77", "--workers", "4"};
  cli::run_cli(args, o1, e);
  cli::run_cli(args, o2, e);
  o.require(o1.str() == o2.str() && !o1.str().empty(), "couple output differs between reruns");
  if (o.ok) o.detail = "n = 1, 5, 10 within " + num(worst) + " sigma; reruns byte-identical";
  return o;
}

Outcome criterion10() {
  Outcome o;
  for (const char* ex : {"example1", "example2"}) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"reproduce", ex}, out, err);
    o.require(code == cli::kExitOk, std::string("reproduce ") + ex + " exited " + std::to_string(code) + ": " + err.str());
  }
  std::ostringstream out, err;
  const int code = cli::run_cli({"analyze", kTestData + "/bad_row_sum.json"}, out, err);
  o.require(code == cli::kExitInput, "malformed spec exited " + std::to_string(code));
  o.require(err.str().find("row 1") != std::string::npos, "violation not named: " + err.str());
  std::ostringstream out2, err2;
  const int code2 = cli::run_cli({"analyze", kTestData + "/malformed.json"}, out2, err2);
  o.require(code2 == cli::kExitInput, "unparsable spec exited " + std::to_string(code2));
  if (o.ok) {
    std::string msg = err.str();
    while (!msg.empty() && msg.back() == '\n') msg.pop_back();
    o.detail = "reproduce example1/example2 exit 0; bad spec exits 2 with \"" + msg + "\"";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Example 1 V exact match", 1.0, criterion1},
      {2, "Example 1 spectrum", 0.0, criterion2},
      {3, "Example 1 comparison table", 0.0, criterion3},
      {4, "Example 2 operator, radius and coefficients", 10.0, criterion4},
      {5, "marginal preservation", 0.0, criterion5},
      {6, "tv <= 2 P(uncoupled) and Gelfand estimate", 0.0, criterion6},
      {7, "k-step Lipschitz ratios", 0.0, criterion7},
      {8, "main bound for kappa = 0.01, delta = 0.05", 30.0, criterion8},
      {9, "Monte Carlo consistency", 0.0, criterion9},
      {10, "CLI reproduction gate", 0.0, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
      result = c.body();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s && result.ok)
      result = {false, "took " + num(secs) + " s, limit " + num(c.time_limit_s) + " s"};
    failures += !result.ok;
    std::printf("%s criterion %d: %s (%.3f s): %s\n", result.ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
                secs, result.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
