#include "nmc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "nmc/errors.hpp"

namespace nmc {
namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

template <class S>
using Dense = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
struct Split {
  std::vector<S> phi1, phi2, phi3;
  S kappa;
  Degeneracy degenerate;
};

// Shared by the double and the exact rational paths; `tol` is zero for the latter.
template <class S>
Split<S> split_pair(const std::vector<S>& p1, const std::vector<S>& p2, const S& tol) {
  using std::min;
  const std::size_t n = p1.size();
  std::vector<S> common(n);
  S kappa{0}, r1{0}, r2{0};
  for (std::size_t j = 0; j < n; ++j) {
    common[j] = min(p1[j], p2[j]);
    kappa += common[j];
    r1 += p1[j] - common[j];
    r2 += p2[j] - common[j];
  }
  Split<S> out;
  if (kappa <= tol) {
    out.kappa = S{0};
    out.degenerate = Degeneracy::kappa_zero;
    out.phi1 = p1;
    out.phi2 = p2;
    out.phi3 = p1;
    return out;
  }
  out.phi3.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.phi3[j] = common[j] / kappa;
  if (kappa >= S{1} - tol) {
    out.kappa = S{1};
    out.degenerate = Degeneracy::kappa_one;
    out.phi1 = p1;
    out.phi2 = p2;
    return out;
  }
  out.kappa = kappa;
  out.degenerate = Degeneracy::none;
  out.phi1.resize(n);
  out.phi2.resize(n);
  // Normalizing by the residual masses (equal to 1 - kappa up to rounding)
  // keeps phi1 and phi2 exactly normalized.
  for (std::size_t j = 0; j < n; ++j) {
    out.phi1[j] = (p1[j] - common[j]) / r1;
    out.phi2[j] = (p2[j] - common[j]) / r2;
  }
  return out;
}

template <class S>
std::vector<S> row_of(const Dense<S>& m, std::size_t i) {
  std::vector<S> out(static_cast<std::size_t>(m.cols()));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = m(ix(i), ix(j));
  return out;
}

template <class S>
struct PairOperator {
  Dense<S> v_hat;
  std::vector<S> survival;
  Dense<S> residual_transition;
};

template <class S>
PairOperator<S> build_pair_operator(const Dense<S>& base, const S& tol) {
  const std::size_t n = static_cast<std::size_t>(base.rows());
  const PairIndex index(n);
  const std::size_t pairs = index.size();
  PairOperator<S> op;
  op.v_hat = Dense<S>::Constant(ix(pairs), ix(pairs), S{0});
  op.residual_transition = Dense<S>::Constant(ix(pairs), ix(n * n), S{0});
  op.survival.assign(pairs, S{0});
  for (std::size_t z = 0; z < pairs; ++z) {
    const auto [x1, x2] = index.pair(z);
    const Split<S> step = split_pair(row_of(base, x1), row_of(base, x2), tol);
    const S survival = S{1} - step.kappa;
    op.survival[z] = survival;
    for (std::size_t y1 = 0; y1 < n; ++y1)
      for (std::size_t y2 = 0; y2 < n; ++y2) {
        const S mass = step.phi1[y1] * step.phi2[y2];
        op.residual_transition(ix(z), ix(y1 * n + y2)) = mass;
        if (y1 != y2) op.v_hat(ix(z), ix(index.index(y1, y2))) = survival * mass;
      }
  }
  return op;
}

Distribution to_distribution(const std::vector<double>& v) {
  Vector out(ix(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[ix(i)] = v[i];
  return Distribution(std::move(out));
}

std::vector<double> to_std(const Distribution& d) {
  return std::vector<double>(d.probs().data(), d.probs().data() + d.probs().size());
}

CouplingStep to_step(const Split<double>& s) {
  return CouplingStep{to_distribution(s.phi1), to_distribution(s.phi2), to_distribution(s.phi3), s.kappa,
                      s.degenerate};
}

void check_same_size(const Distribution& a, const Distribution& b, std::size_t n, const char* where) {
  if (a.size() != n || b.size() != n)
    throw DimensionError(std::string(where) + ": initial laws must have " + std::to_string(n) + " entries");
}

// Inverse-CDF draw over the fixed state order from one uniform.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(const Distribution& d) : cdf_(d.size()) {
    double acc = 0.0;
    last_positive_ = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      acc += d[i];
      cdf_[i] = acc;
      if (d[i] > 0.0) last_positive_ = i;
    }
  }
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(i, last_positive_);
  }

 private:
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

struct StepSampler {
  double kappa = 0.0;
  Categorical phi1, phi2, phi3;
};

struct WorkerCounts {
  std::vector<std::uint64_t> uncoupled, mismatch, marginal1, marginal2;
};

}  // namespace

std::size_t PairIndex::index(std::size_t x1, std::size_t x2) const {
  if (x1 >= n_ || x2 >= n_ || x1 == x2)
    throw DomainError("pair (" + std::to_string(x1) + "," + std::to_string(x2) + ") is not an off-diagonal pair");
  return x1 * (n_ - 1) + (x2 < x1 ? x2 : x2 - 1);
}

std::pair<std::size_t, std::size_t> PairIndex::pair(std::size_t index) const {
  if (index >= size()) throw DomainError("pair index " + std::to_string(index) + " out of range");
  const std::size_t x1 = index / (n_ - 1);
  std::size_t x2 = index % (n_ - 1);
  if (x2 >= x1) ++x2;
  return {x1, x2};
}

CouplingStep residual_densities(const StochasticMatrix& base, std::size_t x1, std::size_t x2) {
  if (x1 >= base.size() || x2 >= base.size())
    throw DomainError("residual_densities: states (" + std::to_string(x1) + "," + std::to_string(x2) +
                      ") out of range");
  return to_step(split_pair(row_of<double>(base.matrix(), x1), row_of<double>(base.matrix(), x2),
                            kDegenerateTolerance));
}

CouplingStep initial_coupling(const Distribution& mu0, const Distribution& nu0) {
  if (mu0.size() != nu0.size()) throw DimensionError("initial_coupling: laws of different length");
  return to_step(split_pair(to_std(mu0), to_std(nu0), kDegenerateTolerance));
}

CouplingOperator build_v_hat(const StochasticMatrix& base) {
  auto op = build_pair_operator<double>(base.matrix(), kDegenerateTolerance);
  Vector survival(ix(op.survival.size()));
  for (std::size_t i = 0; i < op.survival.size(); ++i) survival[ix(i)] = op.survival[i];
  return CouplingOperator{PairIndex(base.size()), std::move(op.v_hat), std::move(survival),
                          std::move(op.residual_transition)};
}

RationalMatrix build_v_hat_exact(const RationalMatrix& base) {
  if (base.rows() != base.cols()) throw DimensionError("build_v_hat_exact: base must be square");
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    Rational total{0};
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      if (base(i, j) < Rational{0} || base(i, j) > Rational{1})
        throw ValidationError("build_v_hat_exact: entry outside [0,1] in row " + std::to_string(i));
      total += base(i, j);
    }
    if (total != Rational{1})
      throw ValidationError("build_v_hat_exact: row " + std::to_string(i) + " sums to " + total.str());
  }
  return build_pair_operator<Rational>(base, Rational{0}).v_hat;
}

std::vector<double> uncoupled_curve(const CouplingOperator& op, const Distribution& mu0,
                                    const Distribution& nu0, std::size_t n_max) {
  const std::size_t n = op.index.states();
  check_same_size(mu0, nu0, n, "uncoupled_curve");
  const CouplingStep start = initial_coupling(mu0, nu0);
  const double escape = 1.0 - start.kappa;

  std::vector<double> curve(n_max + 1, 0.0);
  curve[0] = escape;
  if (n_max == 0 || escape == 0.0) return curve;

  Vector psi = Vector::Zero(ix(op.index.size()));
  for (std::size_t z = 0; z < op.index.size(); ++z) {
    const auto [y1, y2] = op.index.pair(z);
    psi[ix(z)] = start.phi1[y1] * start.phi2[y2];
  }
  Vector w = op.survival;
  for (std::size_t k = 1; k <= n_max; ++k) {
    curve[k] = escape * psi.dot(w);
    if (k < n_max) w = op.v_hat * w;
  }
  return curve;
}

std::vector<double> worst_case_uncoupled_curve(const CouplingOperator& op, std::size_t n_max) {
  std::vector<double> curve(n_max + 1, 0.0);
  if (op.index.size() == 0) return curve;
  curve[0] = 1.0;
  Vector w = op.survival;
  for (std::size_t k = 1; k <= n_max; ++k) {
    curve[k] = w.maxCoeff();
    if (k < n_max) w = op.v_hat * w;
  }
  return curve;
}

double uncoupled_probability_exact(const StochasticMatrix& base, const Distribution& mu0,
                                   const Distribution& nu0, std::size_t n) {
  check_same_size(mu0, nu0, base.size(), "uncoupled_probability_exact");
  return uncoupled_curve(build_v_hat(base), mu0, nu0, n).back();
}

double CouplingSimulation::standard_error(double p) const {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

CouplingSimulation simulate_coupled(const StochasticMatrix& base, const Distribution& mu0,
                                    const Distribution& nu0, std::size_t n, std::size_t trials,
                                    std::uint64_t seed, std::size_t workers) {
  const std::size_t states = base.size();
  check_same_size(mu0, nu0, states, "simulate_coupled");
  if (trials == 0) throw DomainError("simulate_coupled: trials must be at least 1");
  if (workers == 0) throw DomainError("simulate_coupled: workers must be at least 1");
  workers = std::min(workers, trials);

  std::vector<StepSampler> pair_steps(states * states);
  for (std::size_t a = 0; a < states; ++a)
    for (std::size_t b = 0; b < states; ++b) {
      CouplingStep s = residual_densities(base, a, b);
      pair_steps[a * states + b] = StepSampler{s.kappa, Categorical(s.phi1), Categorical(s.phi2), Categorical(s.phi3)};
    }
  std::vector<Categorical> rows;
  rows.reserve(states);
  for (std::size_t a = 0; a < states; ++a) rows.emplace_back(base.row(a));
  const CouplingStep init = initial_coupling(mu0, nu0);
  const StepSampler start{init.kappa, Categorical(init.phi1), Categorical(init.phi2), Categorical(init.phi3)};

  auto transition = [&](const StepSampler& s, ExtendedState& x, Rng& rng) {
    if (rng.uniform() < s.kappa) {
      x.uncoupled = false;
      x.x3 = s.phi3.draw(rng);
    } else {
      x.x1 = s.phi1.draw(rng);
      x.x2 = s.phi2.draw(rng);
    }
  };

  auto run_worker = [&](std::size_t w, std::size_t count, WorkerCounts& out) {
    out.uncoupled.assign(n + 1, 0);
    out.mismatch.assign(n + 1, 0);
    out.marginal1.assign(states, 0);
    out.marginal2.assign(states, 0);
    Rng rng = Rng::substream(seed, w);
    for (std::size_t t = 0; t < count; ++t) {
      ExtendedState x;
      transition(start, x, rng);
      for (std::size_t k = 0;; ++k) {
        if (x.uncoupled) ++out.uncoupled[k];
        if (x.observable1() != x.observable2()) ++out.mismatch[k];
        if (k == n) break;
        if (x.uncoupled)
          transition(pair_steps[x.x1 * states + x.x2], x, rng);
        else
          x.x3 = rows[x.x3].draw(rng);
      }
      ++out.marginal1[x.observable1()];
      ++out.marginal2[x.observable2()];
    }
  };

  std::vector<WorkerCounts> counts(workers);
  const std::size_t share = trials / workers, extra = trials % workers;
  if (workers == 1) {
    run_worker(0, trials, counts[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(run_worker, w, share + (w < extra ? 1 : 0), std::ref(counts[w]));
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> unc(n + 1, 0), mis(n + 1, 0), m1(states, 0), m2(states, 0);
  for (const auto& c : counts) {
    for (std::size_t k = 0; k <= n; ++k) {
      unc[k] += c.uncoupled[k];
      mis[k] += c.mismatch[k];
    }
    for (std::size_t s = 0; s < states; ++s) {
      m1[s] += c.marginal1[s];
      m2[s] += c.marginal2[s];
    }
  }
  const double total = static_cast<double>(trials);
  auto freq = [&](const std::vector<std::uint64_t>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) / total;
    return out;
  };
  auto law = [&](const std::vector<std::uint64_t>& v) {
    Vector p(ix(states));
    for (std::size_t i = 0; i < states; ++i) p[ix(i)] = static_cast<double>(v[i]) / total;
    p /= p.sum();
    return Distribution(std::move(p));
  };
  return CouplingSimulation{n, trials, seed, workers, freq(unc), freq(mis), law(m1), law(m2)};
}

Distribution marginal_law_exact(const StochasticMatrix& base, const Distribution& mu0,
                                const Distribution& nu0, std::size_t n, int which) {
  const std::size_t states = base.size();
  check_same_size(mu0, nu0, states, "marginal_law_exact");
  if (which != 1 && which != 2) throw DomainError("marginal_law_exact: which must be 1 or 2");

  std::vector<CouplingStep> steps;
  steps.reserve(states * states);
  for (std::size_t a = 0; a < states; ++a)
    for (std::size_t b = 0; b < states; ++b) steps.push_back(residual_densities(base, a, b));

  const auto S = ix(states);
  const CouplingStep init = initial_coupling(mu0, nu0);
  Matrix uncoupled = (1.0 - init.kappa) * init.phi1.probs() * init.phi2.probs().transpose();
  Vector coupled = init.kappa * init.phi3.probs();

  for (std::size_t k = 0; k < n; ++k) {
    Matrix next_uncoupled = Matrix::Zero(S, S);
    Vector next_coupled = (coupled.transpose() * base.matrix()).transpose();
    for (std::size_t a = 0; a < states; ++a)
      for (std::size_t b = 0; b < states; ++b) {
        const double mass = uncoupled(ix(a), ix(b));
        if (mass == 0.0) continue;
        const CouplingStep& s = steps[a * states + b];
        next_coupled += mass * s.kappa * s.phi3.probs();
        if (s.kappa < 1.0)
          next_uncoupled += mass * (1.0 - s.kappa) * s.phi1.probs() * s.phi2.probs().transpose();
      }
    uncoupled = std::move(next_uncoupled);
    coupled = std::move(next_coupled);
  }
  Vector law = coupled + (which == 1 ? Vector(uncoupled.rowwise().sum()) : Vector(uncoupled.colwise().sum().transpose()));
  return Distribution(std::move(law));
}

}  // namespace nmc
