#pragma once

#include <algorithm>
#include <span>
#include <string_view>
#include <vector>

#include "onlinetrial/errors.hpp"
#include "onlinetrial/gamma.hpp"
#include "onlinetrial/sequential.hpp"
#include "onlinetrial/static_rules.hpp"

namespace onlinetrial {

// Common state for the batch procedures: one budget level per batch, a
// step-up rule inside the batch, discount weights consumed per batch (weight
// s applies to batch s), and a running total of discoveries.  The reported
// next level is the level that would apply to an immediately following batch
// of size one.
class BatchProcedure : public Procedure {
 public:
  double target_alpha() const final { return alpha_; }
  int horizon() const final { return n_bound_; }
  int tests_consumed() const final { return consumed_; }
  bool batch_oriented() const final { return true; }

  int batches_consumed() const { return batch_index_; }
  int total_rejections() const { return rejections_total_; }
  // Budget level assigned to each consumed batch, in order.
  const std::vector<double>& batch_levels() const { return batch_levels_; }

  double next_level() const final {
    if (consumed_ >= n_bound_) throw BudgetError("hypothesis horizon exhausted");
    return clamp01(level_for_batch(1));
  }

  TestDecision test_one(double p_value) final {
    const double p[1] = {p_value};
    return test_batch(std::span<const double>(p, 1)).front();
  }

  std::vector<TestDecision> test_batch(std::span<const double> p_values) final {
    if (p_values.empty()) throw DomainError("batch must be non-empty");
    check_p_values(p_values);
    const int size = static_cast<int>(p_values.size());
    if (consumed_ + size > n_bound_) throw BudgetError("hypothesis horizon exhausted");

    const double level = clamp01(level_for_batch(size));
    const StepUpResult result = run_within_batch(p_values, level);
    const double cutoff = clamp01(result.cutoff);

    std::vector<TestDecision> decisions(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
      decisions[static_cast<std::size_t>(i)] = {consumed_ + i, cutoff,
                                                p_values[static_cast<std::size_t>(i)], false};
    }
    for (int i : result.rejected) decisions[static_cast<std::size_t>(i)].rejected = true;

    const int batch_rejections = static_cast<int>(result.rejected.size());
    record_batch(level, size, batch_rejections);
    batch_levels_.push_back(level);
    batch_sizes_.push_back(size);
    batch_rejections_.push_back(batch_rejections);
    rejections_total_ += batch_rejections;
    consumed_ += size;
    ++batch_index_;
    return decisions;
  }

 protected:
  BatchProcedure(double alpha, int n_bound, GammaSeq gamma)
      : alpha_(alpha), n_bound_(n_bound), gamma_(std::move(gamma)) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (n_bound < 1) throw DomainError("horizon must be at least 1");
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
  }

  // Budget level assigned to the upcoming batch of the given size.
  virtual double level_for_batch(int batch_size) const = 0;
  // Step-up rule applied inside a batch at the batch level.
  virtual StepUpResult run_within_batch(std::span<const double> p_values,
                                        double level) const = 0;
  // Post-batch state update beyond the shared counters.
  virtual void record_batch(double level, int batch_size, int batch_rejections) = 0;

  static double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

  double alpha_;
  int n_bound_;
  GammaSeq gamma_;
  int consumed_ = 0;
  int batch_index_ = 0;       // batches consumed so far
  int rejections_total_ = 0;  // R_{1:s}
  std::vector<double> batch_levels_;
  std::vector<int> batch_sizes_;
  std::vector<int> batch_rejections_;
};

// Benjamini-Hochberg inside each batch, at level
//   alpha_s = gamma_s * alpha * (1 + R_{1:s-1}).
class BatchBH final : public BatchProcedure {
 public:
  BatchBH(double alpha, int n_bound, GammaSeq gamma)
      : BatchProcedure(alpha, n_bound, std::move(gamma)) {}
  static BatchBH with_defaults(double alpha, int n_bound) {
    return BatchBH(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound));
  }

  std::string_view name() const override { return "batch_bh"; }

 protected:
  double level_for_batch(int) const override {
    return gamma_.values[static_cast<std::size_t>(batch_index_)] * alpha_ *
           static_cast<double>(1 + rejections_total_);
  }
  StepUpResult run_within_batch(std::span<const double> p_values, double level) const override {
    return bh_with_cutoff(p_values, level);
  }
  void record_batch(double, int, int) override {}
};

// Benjamini-Hochberg inside each batch at the level tuned for positive
// dependence within a batch (independence across batches):
//   alpha_s = gamma_s * alpha * (n_s + R_{1:s-1}) / n_s.
class BatchPRDS final : public BatchProcedure {
 public:
  BatchPRDS(double alpha, int n_bound, GammaSeq gamma)
      : BatchProcedure(alpha, n_bound, std::move(gamma)) {}
  static BatchPRDS with_defaults(double alpha, int n_bound) {
    return BatchPRDS(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound));
  }

  std::string_view name() const override { return "batch_prds"; }

 protected:
  double level_for_batch(int batch_size) const override {
    return gamma_.values[static_cast<std::size_t>(batch_index_)] * alpha_ *
           static_cast<double>(batch_size + rejections_total_) /
           static_cast<double>(batch_size);
  }
  StepUpResult run_within_batch(std::span<const double> p_values, double level) const override {
    return bh_with_cutoff(p_values, level);
  }
  void record_batch(double, int, int) override {}
};

// Storey-adjusted Benjamini-Hochberg inside each batch.  The batch level is
// an earned-budget quotient: with R = R_{1:s-1}, W = sum of spent levels
// alpha_u * R_u over past batches, G = gamma_1 + ... + gamma_s, and incoming
// batch size n,
//   alpha_s = min over r in {0..n} of [ alpha * (R + r + G) - W ] / min(r + 1, n)
// floored at zero.  The minimum over hypothetical in-batch rejection counts r
// keeps the false-discovery budget valid whatever the batch produces; the
// divisor is capped at n because a batch cannot yield more than n rejections.
class BatchStBH final : public BatchProcedure {
 public:
  BatchStBH(double alpha, int n_bound, GammaSeq gamma, double lambda)
      : BatchProcedure(alpha, n_bound, std::move(gamma)), lambda_(lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  }
  static BatchStBH with_defaults(double alpha, int n_bound) {
    return BatchStBH(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound), 0.5);
  }

  std::string_view name() const override { return "batch_stbh"; }

 protected:
  double level_for_batch(int batch_size) const override {
    const double cumulative = gamma_.cumulative(batch_index_ + 1);
    double best = 0.0;
    for (int r = 0; r <= batch_size; ++r) {
      const double numerator =
          alpha_ * (static_cast<double>(rejections_total_ + r) + cumulative) - spent_;
      const double divisor = static_cast<double>(std::min(r + 1, batch_size));
      const double candidate = numerator / divisor;
      if (r == 0 || candidate < best) best = candidate;
    }
    return std::max(0.0, best);
  }
  StepUpResult run_within_batch(std::span<const double> p_values, double level) const override {
    return storey_bh_with_cutoff(p_values, level, lambda_);
  }
  void record_batch(double level, int, int batch_rejections) override {
    spent_ += level * static_cast<double>(batch_rejections);
  }

 private:
  double lambda_;
  double spent_ = 0.0;  // sum over past batches of alpha_u * R_u
};

}  // namespace onlinetrial
