#include "scalemix/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalemix/distributions.hpp"
#include "scalemix/error.hpp"
#include "scalemix/linalg.hpp"

namespace scalemix {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
constexpr double kMinStep = 1e-4;
constexpr double kMaxStep = 10.0;

}  // namespace

Eigen::MatrixXd center_discrete(const Eigen::MatrixXd& values, int num_discrete, double c) {
  if (num_discrete < 0 || num_discrete > values.cols())
    throw Error(ErrorCode::DimensionMismatch, "discrete column count exceeds the data width");
  Eigen::MatrixXd out = values;
  out.leftCols(num_discrete).array() -= c;
  return out;
}

PrecisionDecomp decompose_precision(const Eigen::MatrixXd& omega) {
  if (omega.rows() != omega.cols())
    throw Error(ErrorCode::DimensionMismatch, "precision matrix must be square");
  if (!is_positive_definite(omega))
    throw Error(ErrorCode::NotPositiveDefinite, "precision matrix is not positive definite");
  const int p = static_cast<int>(omega.rows());
  PrecisionDecomp out;
  out.theta = omega.diagonal().array().sqrt();
  out.gamma.resize(p, p);
  out.inclusion = empty_adjacency(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      out.gamma(i, j) = i == j ? 1.0 : omega(i, j) / (out.theta(i) * out.theta(j));
      if (i != j && omega(i, j) != 0.0) out.inclusion[i].insert(j);
    }
  }
  return out;
}

Eigen::MatrixXd precision_from_decomp(const PrecisionDecomp& decomp) {
  return decomp.theta.asDiagonal() * decomp.gamma * decomp.theta.asDiagonal();
}

void MixedConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(ErrorCode::InvalidParams, "alpha and beta must be positive");
  if (!(pg_b > 0.0) || pg_b != std::floor(pg_b))
    throw Error(ErrorCode::InvalidParams, "pg_b must be a positive integer");
  if (!(slab_prob > 0.0 && slab_prob < 1.0))
    throw Error(ErrorCode::InvalidParams, "slab_prob must lie in (0, 1)");
  if (!(theta_step > 0.0) || !(omega_step > 0.0) || !(gamma_step > 0.0))
    throw Error(ErrorCode::InvalidParams, "step sizes must be positive");
  if (burnin < 0 || iters <= burnin)
    throw Error(ErrorCode::InvalidParams, "need iters > burnin >= 0");
  if (adapt_interval < 1 || drift_check_interval < 1)
    throw Error(ErrorCode::InvalidParams, "adapt and drift intervals must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidParams, "threshold must lie in (0, 1)");
}

MixedSampler::MixedSampler(Eigen::MatrixXd centered, int num_discrete, MixedConfig config)
    : n_(static_cast<int>(centered.rows())), d_(num_discrete), config_(config) {
  config_.validate();
  const int p = static_cast<int>(centered.cols());
  if (d_ < 0 || d_ > p) throw Error(ErrorCode::DimensionMismatch, "bad discrete column count");
  if (n_ < 1) throw Error(ErrorCode::InvalidParams, "need at least one observation");
  if (!centered.allFinite()) throw Error(ErrorCode::InvalidParams, "data contain non-finite values");
  s_ = centered.transpose() * centered;

  theta_steps_.resize(p);
  for (int j = 0; j < p; ++j) theta_steps_(j) = j < d_ ? config_.omega_step : config_.theta_step;
  gamma_step_ = config_.gamma_step;
  theta_counters_.assign(p, Counter{});

  // Start from Gamma = I with each Omega_jj matched to the column's second moment.
  Eigen::VectorXd theta(p);
  for (int j = 0; j < p; ++j) {
    const double m2 = s_(j, j) / n_;
    if (!(m2 > 0.0))
      throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j) + " is identically zero");
    theta(j) = 1.0 / std::sqrt(m2);
  }
  set_state(theta, Eigen::MatrixXd::Identity(p, p));
}

void MixedSampler::set_state(const Eigen::VectorXd& theta, const Eigen::MatrixXd& gamma) {
  const int p = static_cast<int>(s_.rows());
  if (theta.size() != p || gamma.rows() != p || gamma.cols() != p)
    throw Error(ErrorCode::DimensionMismatch, "state does not match the data");
  state_.decomp.theta = theta;
  state_.decomp.gamma = gamma;
  state_.decomp.inclusion = empty_adjacency(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j && gamma(i, j) != 0.0) state_.decomp.inclusion[i].insert(j);
  state_.omega.resize(d_);
  for (int j = 0; j < d_; ++j) state_.omega(j) = 1.0 / (theta(j) * theta(j));
  w_ = inverse_spd(gamma);
  state_.loglik = full_loglik();
}

double MixedSampler::full_loglik() const {
  const auto& th = state_.decomp.theta;
  const Eigen::MatrixXd omega = precision_from_decomp(state_.decomp);
  const double log_det = log_det_spd(state_.decomp.gamma) + 2.0 * th.array().log().sum();
  const double p = static_cast<double>(s_.rows());
  return 0.5 * n_ * log_det - 0.5 * (omega.array() * s_.array()).sum() - 0.5 * n_ * p * kLog2Pi;
}

double MixedSampler::refresh() {
  w_ = inverse_spd(state_.decomp.gamma);
  const double fresh = full_loglik();
  const double drift = std::abs(fresh - state_.loglik);
  state_.loglik = fresh;
  return drift;
}

double MixedSampler::theta_loglik_part(int j, double t) const {
  const auto& th = state_.decomp.theta;
  const auto& g = state_.decomp.gamma;
  double a = 0.0;
  for (Eigen::Index k = 0; k < th.size(); ++k)
    if (k != j) a += th(k) * g(j, k) * s_(j, k);
  return n_ * std::log(t) - 0.5 * t * t * s_(j, j) - t * a;
}

void MixedSampler::set_theta(int j, double t) {
  state_.decomp.theta(j) = t;
  if (j < d_) state_.omega(j) = 1.0 / (t * t);
}

void MixedSampler::adapt_step(Counter& c, double& step) const {
  if (c.batch_tries == 0) return;
  const double rate = static_cast<double>(c.batch_accepts) / c.batch_tries;
  if (rate < 0.3)
    step = std::max(kMinStep, step * 0.8);
  else if (rate > 0.5)
    step = std::min(kMaxStep, step * 1.25);
  c.batch_tries = c.batch_accepts = 0;
}

void MixedSampler::update_omega(Rng& rng, bool adapt) {
  for (int j = 0; j < d_; ++j) {
    const double w = state_.omega(j);
    const double w_new = w * std::exp(theta_steps_(j) * std_normal(rng));
    const double t = state_.decomp.theta(j);
    const double t_new = 1.0 / std::sqrt(w_new);
    const double d_lik = theta_loglik_part(j, t_new) - theta_loglik_part(j, t);
    const double log_alpha = d_lik + log_pg_density(config_.pg_b, w_new) -
                             log_pg_density(config_.pg_b, w) + std::log(w_new) - std::log(w);
    const bool ok = std::log(uniform_open(rng)) < log_alpha;
    theta_counters_[j].record(ok);
    if (ok) {
      set_theta(j, t_new);
      state_.loglik += d_lik;
    }
    if (adapt && (adapt_calls_ + 1) % config_.adapt_interval == 0)
      adapt_step(theta_counters_[j], theta_steps_(j));
  }
}

void MixedSampler::update_theta(Rng& rng, bool adapt) {
  const int p = static_cast<int>(s_.rows());
  for (int j = d_; j < p; ++j) {
    // Random walk on log k with k = theta^2 ~ Gamma(alpha, rate beta).
    const double t = state_.decomp.theta(j);
    const double k = t * t;
    const double k_new = k * std::exp(theta_steps_(j) * std_normal(rng));
    const double t_new = std::sqrt(k_new);
    const double d_lik = theta_loglik_part(j, t_new) - theta_loglik_part(j, t);
    const double log_alpha =
        d_lik + config_.alpha * (std::log(k_new) - std::log(k)) - config_.beta * (k_new - k);
    const bool ok = std::log(uniform_open(rng)) < log_alpha;
    theta_counters_[j].record(ok);
    if (ok) {
      set_theta(j, t_new);
      state_.loglik += d_lik;
    }
    if (adapt && (adapt_calls_ + 1) % config_.adapt_interval == 0)
      adapt_step(theta_counters_[j], theta_steps_(j));
  }
}

void MixedSampler::apply_gamma_change(int i, int j, double delta, double r) {
  // Rank-2 Woodbury update of W = Gamma^-1 for Gamma += delta (e_i e_j' + e_j e_i').
  const double wij = w_(i, j);
  const double c11 = delta * delta * w_(j, j);
  const double c22 = delta * delta * w_(i, i);
  const double c12 = -delta * (delta * wij + 1.0);
  const Eigen::VectorXd wi = w_.col(i);
  const Eigen::VectorXd wj = w_.col(j);
  w_.noalias() += (1.0 / r) * (c11 * wi * wi.transpose() + c22 * wj * wj.transpose() +
                               c12 * (wi * wj.transpose() + wj * wi.transpose()));

  double& g = state_.decomp.gamma(i, j);
  g += delta;
  if (std::abs(g) < 1e-300) g = 0.0;
  state_.decomp.gamma(j, i) = g;
  if (g == 0.0) {
    state_.decomp.inclusion[i].erase(j);
    state_.decomp.inclusion[j].erase(i);
  } else {
    state_.decomp.inclusion[i].insert(j);
    state_.decomp.inclusion[j].insert(i);
  }
}

void MixedSampler::update_gamma(Rng& rng, bool adapt) {
  const int p = static_cast<int>(s_.rows());
  const auto& th = state_.decomp.theta;
  const double log_prior_odds = std::log(config_.slab_prob) - std::log1p(-config_.slab_prob);

  // Feasible increments (lo, hi) keep Gamma positive definite:
  // det(Gamma + delta E_ij) / det(Gamma) = (1 + delta w_ij)^2 - delta^2 w_ii w_jj.
  auto interval = [&](int i, int j, double& lo, double& hi) {
    const double s = std::sqrt(w_(i, i) * w_(j, j));
    lo = -1.0 / (s + w_(i, j));
    hi = 1.0 / (s - w_(i, j));
  };
  auto det_ratio = [&](int i, int j, double delta) {
    const double a = 1.0 + delta * w_(i, j);
    return a * a - delta * delta * w_(i, i) * w_(j, j);
  };
  auto lik_change = [&](int i, int j, double delta, double r) {
    return 0.5 * n_ * std::log(r) - delta * th(i) * th(j) * s_(i, j);
  };

  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double x = state_.decomp.gamma(i, j);
      double lo, hi;
      interval(i, j, lo, hi);
      const double width = hi - lo;

      // Spike <-> slab. The slab is Uniform(-1, 1) restricted to the
      // positive-definite region, which given the rest is (x + lo, x + hi).
      double delta = 0.0, log_alpha = -std::numeric_limits<double>::infinity();
      if (x == 0.0) {
        delta = lo + width * uniform01(rng);
        const double r = det_ratio(i, j, delta);
        if (delta != 0.0 && r > 0.0)
          log_alpha = log_prior_odds + std::log(0.5 * width) + lik_change(i, j, delta, r);
      } else {
        delta = -x;
        const double r = det_ratio(i, j, delta);
        if (delta > lo && delta < hi && r > 0.0)
          log_alpha = -log_prior_odds - std::log(0.5 * width) + lik_change(i, j, delta, r);
      }
      {
        const double r = det_ratio(i, j, delta);
        const bool ok = std::log(uniform_open(rng)) < log_alpha;
        toggle_counter_.record(ok);
        if (ok) {
          state_.loglik += lik_change(i, j, delta, r);
          apply_gamma_change(i, j, delta, r);
        }
      }

      // Within-slab random walk.
      if (state_.decomp.gamma(i, j) != 0.0) {
        interval(i, j, lo, hi);
        const double step = gamma_step_ * std_normal(rng);
        const double x_now = state_.decomp.gamma(i, j);
        bool ok = false;
        if (step > lo && step < hi && x_now + step != 0.0) {
          const double r = det_ratio(i, j, step);
          if (r > 0.0) {
            const double d_lik = lik_change(i, j, step, r);
            ok = std::log(uniform_open(rng)) < d_lik;
            if (ok) {
              state_.loglik += d_lik;
              apply_gamma_change(i, j, step, r);
            }
          }
        }
        slab_counter_.record(ok);
      }
    }
  }
  if (adapt && (adapt_calls_ + 1) % config_.adapt_interval == 0)
    adapt_step(slab_counter_, gamma_step_);
  if (adapt) ++adapt_calls_;
  // Drop accumulated rounding in W and verify positive definiteness.
  w_ = inverse_spd(state_.decomp.gamma);
}

std::map<std::string, double> MixedSampler::acceptance_rates() const {
  auto rate = [](long a, long t) { return t == 0 ? 0.0 : static_cast<double>(a) / t; };
  long ot = 0, oa = 0, tt = 0, ta = 0;
  for (int j = 0; j < static_cast<int>(theta_counters_.size()); ++j) {
    (j < d_ ? ot : tt) += theta_counters_[j].tries;
    (j < d_ ? oa : ta) += theta_counters_[j].accepts;
  }
  return {{"omega", rate(oa, ot)},
          {"theta", rate(ta, tt)},
          {"gamma_toggle", rate(toggle_counter_.accepts, toggle_counter_.tries)},
          {"gamma_slab", rate(slab_counter_.accepts, slab_counter_.tries)}};
}

void MixedSampler::reset_acceptance_counters() {
  for (auto& c : theta_counters_) c.tries = c.accepts = 0;
  toggle_counter_.tries = toggle_counter_.accepts = 0;
  slab_counter_.tries = slab_counter_.accepts = 0;
}

PosteriorSummary run_mixed_chain(const MixedData& data, const MixedConfig& config) {
  MixedSampler sampler(center_discrete(data.values, data.num_discrete, data.centering),
                       data.num_discrete, config);
  const MixedConfig& cfg = sampler.config();
  Rng rng(cfg.seed);
  SummaryAccumulator acc(data.dim(), data.num_discrete);
  std::vector<double> trace;
  trace.reserve(cfg.iters);
  double max_drift = 0.0;

  for (int t = 0; t < cfg.iters; ++t) {
    try {
      const bool burn = t < cfg.burnin;
      if (t == cfg.burnin) sampler.reset_acceptance_counters();
      sampler.update_omega(rng, burn);
      sampler.update_theta(rng, burn);
      sampler.update_gamma(rng, burn);
      if (!burn) acc.add(sampler.state().decomp.inclusion, sampler.precision(), sampler.state().omega);
      trace.push_back(sampler.state().loglik);
      if ((t + 1) % cfg.drift_check_interval == 0) {
        const double scale = std::max(1.0, std::abs(sampler.state().loglik));
        max_drift = std::max(max_drift, sampler.refresh() / scale);
      }
    } catch (const Error& err) {
      throw Error(err.code(), std::string(err.what()) + " (iteration " + std::to_string(t) + ")");
    }
  }

  PosteriorSummary out = acc.finish(cfg.threshold);
  out.loglik_traces.push_back(std::move(trace));
  out.acceptance = sampler.acceptance_rates();
  out.diagnostics["max_relative_loglik_drift"] = max_drift;
  return out;
}

}  // namespace scalemix
