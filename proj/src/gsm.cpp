#include "scalemix/gsm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalemix/error.hpp"
#include "scalemix/hmt.hpp"

namespace scalemix {

namespace {

constexpr double kMinStep = 1e-4;
constexpr double kMaxStep = 10.0;

double location(const MarginSpec& m, double d) { return m.skew_alpha + m.skew_beta * d; }

}  // namespace

void GsmConfig::validate(int q) const {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidParams, "b must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(ErrorCode::InvalidParams, "rho must be positive");
  if (!(scale_step > 0.0)) throw Error(ErrorCode::InvalidParams, "scale_step must be positive");
  if (burnin < 0 || iters <= burnin)
    throw Error(ErrorCode::InvalidParams, "need iters > burnin >= 0");
  if (graph_moves_per_sweep < 0)
    throw Error(ErrorCode::InvalidParams, "graph_moves_per_sweep must be >= 0");
  if (adapt_interval < 1 || drift_check_interval < 1)
    throw Error(ErrorCode::InvalidParams, "adapt and drift intervals must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidParams, "threshold must lie in (0, 1)");
  if (static_cast<int>(margins.size()) != q)
    throw Error(ErrorCode::DimensionMismatch, "need one margin spec per column");
  for (const auto& m : margins) scalemix::validate(m.mixing);
  if (edge_weights.num_vertices() != 0 && edge_weights.num_vertices() != q)
    throw Error(ErrorCode::DimensionMismatch, "edge weights do not match the column count");
}

Eigen::MatrixXd transform(const Eigen::MatrixXd& data, const Eigen::VectorXd& scales,
                          const std::vector<MarginSpec>& margins) {
  if (scales.size() != data.cols() || static_cast<Eigen::Index>(margins.size()) != data.cols())
    throw Error(ErrorCode::DimensionMismatch, "scales and margins must match the column count");
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.cols(); ++i) {
    const double d = scales(i);
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorCode::NonPositiveScale, "scale d_" + std::to_string(i) + " is not positive");
    out.col(i) = (data.col(i).array() - location(margins[i], d)) / std::sqrt(d);
  }
  return out;
}

GsmSampler::GsmSampler(Eigen::MatrixXd data, GsmConfig config)
    : data_(std::move(data)), config_(std::move(config)) {
  const int q = static_cast<int>(data_.cols());
  if (config_.margins.empty()) config_.margins.assign(q, MarginSpec{});
  if (config_.edge_weights.num_vertices() == 0)
    config_.edge_weights = EdgePriorWeights::constant(q, 0.1);
  config_.validate(q);
  if (!data_.allFinite()) throw Error(ErrorCode::InvalidParams, "data contain non-finite values");

  raw_gram_ = data_.transpose() * data_;
  col_sums_ = data_.colwise().sum().transpose();
  steps_ = Eigen::VectorXd::Constant(q, config_.scale_step);
  scale_tries_ = scale_accepts_ = batch_tries_ = batch_accepts_ = Eigen::VectorXi::Zero(q);

  // Start from the empty graph with scales matched to the prior scale of
  // Sigma_ii, whose inverse Wishart mean is rho / (b - 2) when b > 2.
  Eigen::VectorXd init = Eigen::VectorXd::Ones(q);
  const double prior_var = config_.b > 2.0 ? config_.rho / (config_.b - 2.0) : config_.rho;
  const double n = static_cast<double>(data_.rows());
  for (int i = 0; i < q; ++i) {
    if (is_degenerate(config_.margins[i].mixing) || data_.rows() < 2) continue;
    const double mean = col_sums_(i) / n;
    const double var = (raw_gram_(i, i) - n * mean * mean) / (n - 1.0);
    init(i) = std::clamp(var / prior_var, 1e-6, 1e6);
  }
  reset(DecomposableGraph(q), init);
}

void GsmSampler::reset(const DecomposableGraph& graph, const Eigen::VectorXd& scales) {
  const int q = static_cast<int>(data_.cols());
  if (graph.num_vertices() != q || scales.size() != q)
    throw Error(ErrorCode::DimensionMismatch, "state does not match the data");
  state_.graph = graph;
  state_.scales = scales;
  state_.sigma.reset();
  state_.precision.reset();
  moves_ = legal_moves(graph);
  const Eigen::MatrixXd z = transform(data_, state_.scales, config_.margins);
  gram_z_ = z.transpose() * z;
  rebuild_structure();
  state_.log_marginal = 0.0;
  for (double t : clique_terms_) state_.log_marginal += t;
  for (double t : sep_terms_) state_.log_marginal -= t;
}

void GsmSampler::rebuild_structure() {
  const int q = state_.graph.num_vertices();
  clique_idx_.clear();
  sep_idx_.clear();
  clique_terms_.clear();
  sep_terms_.clear();
  cliques_of_.assign(q, {});
  seps_of_.assign(q, {});
  for (const auto& c : state_.graph.cliques()) {
    clique_idx_.push_back(c.to_vector());
    clique_terms_.push_back(subset_term(clique_idx_.back()));
    for (int v : clique_idx_.back()) cliques_of_[v].push_back(static_cast<int>(clique_idx_.size()) - 1);
  }
  for (const auto& s : state_.graph.separators()) {
    if (s.empty()) continue;
    sep_idx_.push_back(s.to_vector());
    sep_terms_.push_back(subset_term(sep_idx_.back()));
    for (int v : sep_idx_.back()) seps_of_[v].push_back(static_cast<int>(sep_idx_.size()) - 1);
  }
}

double GsmSampler::subset_term(const std::vector<int>& idx) const {
  return log_hmt_subset_term(gram_z_, idx, num_samples(), config_.b, config_.rho);
}

void GsmSampler::refresh_gram_row(int i, double d, Eigen::VectorXd& row) const {
  // z_i'z_j from the raw Gram matrix and column sums; with m the location and
  // s the sqrt-scale, z_i'z_j = (y_i'y_j - m_i S_j - m_j S_i + n m_i m_j) / (s_i s_j).
  const int q = static_cast<int>(data_.cols());
  const double n = static_cast<double>(data_.rows());
  const double mi = location(config_.margins[i], d);
  const double si = std::sqrt(d);
  row.resize(q);
  for (int j = 0; j < q; ++j) {
    const double dj = j == i ? d : state_.scales(j);
    const double mj = location(config_.margins[j], dj);
    const double sj = std::sqrt(dj);
    row(j) = (raw_gram_(i, j) - mi * col_sums_(j) - mj * col_sums_(i) + n * mi * mj) / (si * sj);
  }
}

double GsmSampler::column_log_jacobian(int, double d) const {
  return -0.5 * static_cast<double>(data_.rows()) * std::log(d);
}

bool GsmSampler::update_graph(Rng& rng) {
  if (state_.graph.num_vertices() < 2) return false;
  const EdgeProposal prop = propose_edge_move(state_.graph, moves_, rng);
  const Edge e = prop.move.edge;
  const double d_lik = log_hmt_edge_toggle_ratio(state_.graph, e, gram_z_, num_samples(),
                                                 config_.b, config_.rho);
  const double d_prior = graph_log_prior_ratio(config_.edge_weights, e, prop.move.is_addition);
  const double log_alpha = d_lik + d_prior + prop.move.log_reverse - prop.move.log_forward;
  ++graph_tries_;
  if (!(std::log(uniform_open(rng)) < log_alpha)) return false;
  ++graph_accepts_;
  state_.graph = prop.graph;
  moves_ = prop.moves;
  rebuild_structure();
  state_.log_marginal += d_lik;
  return true;
}

void GsmSampler::update_scales(Rng& rng, bool adapt) {
  const int q = static_cast<int>(data_.cols());
  Eigen::VectorXd new_row, old_row;
  std::vector<double> new_c, new_s;
  for (int i = 0; i < q; ++i) {
    const MixingFamily& family = config_.margins[i].mixing;
    if (is_degenerate(family)) continue;
    const double d = state_.scales(i);
    const double d_new = d * std::exp(steps_(i) * std_normal(rng));
    if (!(d_new > 0.0) || !std::isfinite(d_new)) {
      ++scale_tries_(i);
      ++batch_tries_(i);
      continue;
    }

    refresh_gram_row(i, d_new, new_row);
    old_row = gram_z_.row(i).transpose();
    gram_z_.row(i) = new_row.transpose();
    gram_z_.col(i) = new_row;

    double delta = 0.0;
    new_c.clear();
    new_s.clear();
    for (int c : cliques_of_[i]) {
      new_c.push_back(subset_term(clique_idx_[c]));
      delta += new_c.back() - clique_terms_[c];
    }
    for (int s : seps_of_[i]) {
      new_s.push_back(subset_term(sep_idx_[s]));
      delta -= new_s.back() - sep_terms_[s];
    }
    const double log_alpha = delta + column_log_jacobian(i, d_new) - column_log_jacobian(i, d) +
                             log_mixing_density(family, d_new) - log_mixing_density(family, d) +
                             std::log(d_new) - std::log(d);

    ++scale_tries_(i);
    ++batch_tries_(i);
    if (std::log(uniform_open(rng)) < log_alpha) {
      ++scale_accepts_(i);
      ++batch_accepts_(i);
      state_.scales(i) = d_new;
      state_.log_marginal += delta;
      for (std::size_t k = 0; k < new_c.size(); ++k) clique_terms_[cliques_of_[i][k]] = new_c[k];
      for (std::size_t k = 0; k < new_s.size(); ++k) sep_terms_[seps_of_[i][k]] = new_s[k];
    } else {
      gram_z_.row(i) = old_row.transpose();
      gram_z_.col(i) = old_row;
    }
  }

  if (!adapt) return;
  if (++adapt_calls_ % config_.adapt_interval != 0) return;
  for (int i = 0; i < q; ++i) {
    if (batch_tries_(i) == 0) continue;
    const double rate = static_cast<double>(batch_accepts_(i)) / batch_tries_(i);
    if (rate < 0.3)
      steps_(i) = std::max(kMinStep, steps_(i) * 0.8);
    else if (rate > 0.5)
      steps_(i) = std::min(kMaxStep, steps_(i) * 1.25);
  }
  batch_tries_.setZero();
  batch_accepts_.setZero();
}

HiwDraw GsmSampler::sample_sigma_posterior(Rng& rng) {
  HiwParams post;
  post.degrees = config_.b + num_samples();
  post.scale = gram_z_;
  post.scale.diagonal().array() += config_.rho;
  post.scale = 0.5 * (post.scale + post.scale.transpose());
  HiwDraw draw = sample_hiw(state_.graph, post, rng);
  state_.sigma = draw.sigma;
  state_.precision = draw.precision;
  return draw;
}

double GsmSampler::log_likelihood() const {
  double out = state_.log_marginal;
  for (Eigen::Index i = 0; i < state_.scales.size(); ++i)
    out += column_log_jacobian(static_cast<int>(i), state_.scales(i));
  return out;
}

double GsmSampler::refresh_log_marginal() {
  const Eigen::MatrixXd z = transform(data_, state_.scales, config_.margins);
  gram_z_ = z.transpose() * z;
  rebuild_structure();
  double fresh = 0.0;
  for (double t : clique_terms_) fresh += t;
  for (double t : sep_terms_) fresh -= t;
  const double drift = std::abs(fresh - state_.log_marginal);
  state_.log_marginal = fresh;
  return drift;
}

double GsmSampler::graph_acceptance_rate() const {
  return graph_tries_ == 0 ? 0.0 : static_cast<double>(graph_accepts_) / graph_tries_;
}

double GsmSampler::scale_acceptance_rate() const {
  const long tries = scale_tries_.sum();
  return tries == 0 ? 0.0 : static_cast<double>(scale_accepts_.sum()) / tries;
}

void GsmSampler::reset_acceptance_counters() {
  graph_tries_ = graph_accepts_ = 0;
  scale_tries_.setZero();
  scale_accepts_.setZero();
}

PosteriorSummary run_chain(const Eigen::MatrixXd& data, const GsmConfig& config) {
  GsmSampler sampler(data, config);
  const GsmConfig& cfg = sampler.config();
  const int q = static_cast<int>(data.cols());
  Rng rng(cfg.seed);
  SummaryAccumulator acc(q, q);
  std::vector<double> trace;
  trace.reserve(cfg.iters);
  double max_drift = 0.0;
  const Eigen::MatrixXd no_precision = Eigen::MatrixXd::Zero(q, q);

  for (int t = 0; t < cfg.iters; ++t) {
    try {
      const bool burn = t < cfg.burnin;
      if (t == cfg.burnin) sampler.reset_acceptance_counters();
      for (int k = 0; k < cfg.graph_moves_per_sweep; ++k) sampler.update_graph(rng);
      sampler.update_scales(rng, burn);
      if (!burn) {
        if (cfg.sample_sigma) {
          const HiwDraw draw = sampler.sample_sigma_posterior(rng);
          acc.add(sampler.state().graph.adjacency(), draw.precision, sampler.state().scales);
        } else {
          acc.add(sampler.state().graph.adjacency(), no_precision, sampler.state().scales);
        }
      }
      trace.push_back(sampler.log_likelihood());
      if ((t + 1) % cfg.drift_check_interval == 0) {
        const double scale = std::max(1.0, std::abs(sampler.state().log_marginal));
        max_drift = std::max(max_drift, sampler.refresh_log_marginal() / scale);
      }
    } catch (const Error& err) {
      throw Error(err.code(), std::string(err.what()) + " (iteration " + std::to_string(t) + ")");
    }
  }

  PosteriorSummary out = acc.finish(cfg.threshold);
  out.loglik_traces.push_back(std::move(trace));
  out.acceptance["graph"] = sampler.graph_acceptance_rate();
  out.acceptance["scale"] = sampler.scale_acceptance_rate();
  out.diagnostics["max_relative_log_marginal_drift"] = max_drift;
  return out;
}

}  // namespace scalemix
