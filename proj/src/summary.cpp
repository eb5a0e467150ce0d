#include "scalemix/summary.hpp"

#include <algorithm>
#include <limits>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double ratio(long est, long truth) {
  return truth == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(est) / static_cast<double>(truth);
}

}  // namespace

Eigen::MatrixXi classify_signs(const Eigen::MatrixXd& edge_prob,
                               const Eigen::MatrixXd& mean_precision, double threshold) {
  if (edge_prob.rows() != mean_precision.rows() || edge_prob.cols() != mean_precision.cols())
    throw Error(ErrorCode::DimensionMismatch, "edge_prob and mean_precision differ in shape");
  Eigen::MatrixXi out(edge_prob.rows(), edge_prob.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = edge_prob(i, j) > threshold ? sign_of(mean_precision(i, j)) : 0;
  return out;
}

SummaryAccumulator::SummaryAccumulator(int dim, int num_scales)
    : edge_count_(Eigen::MatrixXd::Zero(dim, dim)),
      precision_sum_(Eigen::MatrixXd::Zero(dim, dim)),
      scale_sum_(Eigen::VectorXd::Zero(num_scales)) {}

void SummaryAccumulator::add(const Adjacency& inclusion, const Eigen::MatrixXd& precision,
                             const Eigen::VectorXd& scales) {
  const Eigen::Index dim = edge_count_.rows();
  if (static_cast<Eigen::Index>(inclusion.size()) != dim || precision.rows() != dim ||
      precision.cols() != dim || scales.size() != scale_sum_.size())
    throw Error(ErrorCode::DimensionMismatch, "posterior sample has the wrong dimensions");
  for (Eigen::Index u = 0; u < dim; ++u)
    inclusion[u].for_each([&](int v) { edge_count_(u, v) += 1.0; });
  precision_sum_ += precision;
  scale_sum_ += scales;
  ++count_;
}

void SummaryAccumulator::merge(const SummaryAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.edge_count_.rows() != edge_count_.rows() ||
      other.scale_sum_.size() != scale_sum_.size())
    throw Error(ErrorCode::DimensionMismatch, "cannot merge summaries of different shapes");
  edge_count_ += other.edge_count_;
  precision_sum_ += other.precision_sum_;
  scale_sum_ += other.scale_sum_;
  count_ += other.count_;
}

PosteriorSummary SummaryAccumulator::finish(double threshold) const {
  if (count_ == 0) throw Error(ErrorCode::EmptySampleSet, "no post-burn-in samples to summarize");
  const double n = static_cast<double>(count_);
  PosteriorSummary s;
  s.edge_prob = edge_count_ / n;
  s.edge_prob.diagonal().setOnes();
  s.mean_precision = precision_sum_ / n;
  s.scale_means = scale_sum_ / n;
  s.num_samples = count_;
  s.threshold = threshold;
  s.sign_class = classify_signs(s.edge_prob, s.mean_precision, threshold);
  return s;
}

PosteriorSummary summarize(const std::vector<PosteriorSample>& samples, double threshold) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples to summarize");
  SummaryAccumulator acc(static_cast<int>(samples.front().precision.rows()),
                         static_cast<int>(samples.front().scales.size()));
  for (const auto& s : samples) acc.add(s);
  return acc.finish(threshold);
}

PosteriorSummary merge_summaries(const std::vector<PosteriorSummary>& parts, double threshold) {
  if (parts.empty()) throw Error(ErrorCode::EmptySampleSet, "no chains to merge");
  std::size_t total = 0;
  for (const auto& p : parts) total += p.num_samples;
  if (total == 0) throw Error(ErrorCode::EmptySampleSet, "no post-burn-in samples to merge");

  PosteriorSummary out;
  out.edge_prob = Eigen::MatrixXd::Zero(parts[0].edge_prob.rows(), parts[0].edge_prob.cols());
  out.mean_precision = out.edge_prob;
  out.scale_means = Eigen::VectorXd::Zero(parts[0].scale_means.size());
  for (const auto& p : parts) {
    if (p.edge_prob.rows() != out.edge_prob.rows() ||
        p.scale_means.size() != out.scale_means.size())
      throw Error(ErrorCode::DimensionMismatch, "cannot merge summaries of different shapes");
    const double w = static_cast<double>(p.num_samples) / static_cast<double>(total);
    out.edge_prob += w * p.edge_prob;
    out.mean_precision += w * p.mean_precision;
    out.scale_means += w * p.scale_means;
    for (const auto& [name, rate] : p.acceptance) out.acceptance[name] += w * rate;
    for (const auto& [name, value] : p.diagnostics)
      out.diagnostics[name] = std::max(out.diagnostics[name], value);
    out.loglik_traces.insert(out.loglik_traces.end(), p.loglik_traces.begin(),
                             p.loglik_traces.end());
  }
  out.edge_prob.diagonal().setOnes();
  out.num_samples = total;
  out.threshold = threshold;
  out.sign_class = classify_signs(out.edge_prob, out.mean_precision, threshold);
  return out;
}

Eigen::MatrixXi sign_matrix(const Eigen::MatrixXd& m) {
  Eigen::MatrixXi out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = sign_of(m(i, j));
  return out;
}

SignTable sign_detection_table(const Eigen::MatrixXi& estimated_sign, const Eigen::MatrixXd& truth,
                               bool include_diagonal) {
  if (estimated_sign.rows() != truth.rows() || estimated_sign.cols() != truth.cols())
    throw Error(ErrorCode::DimensionMismatch, "estimate and truth differ in shape");
  SignTable t;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (i == j && !include_diagonal) continue;
      const int e = estimated_sign(i, j);
      const int s = sign_of(truth(i, j));
      if (e < -1 || e > 1) throw Error(ErrorCode::InvalidParams, "sign entries must be -1, 0 or 1");
      (e == 0 ? t.est_zero : e > 0 ? t.est_pos : t.est_neg) += 1;
      (s == 0 ? t.true_zero : s > 0 ? t.true_pos : t.true_neg) += 1;
    }
  }
  t.ratio_zero = ratio(t.est_zero, t.true_zero);
  t.ratio_pos = ratio(t.est_pos, t.true_pos);
  t.ratio_neg = ratio(t.est_neg, t.true_neg);
  return t;
}

}  // namespace scalemix
