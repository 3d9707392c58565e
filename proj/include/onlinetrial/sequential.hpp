#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "onlinetrial/errors.hpp"
#include "onlinetrial/gamma.hpp"

namespace onlinetrial {

// Outcome of testing one hypothesis.  The invariant rejected <=> p <= level
// holds for every procedure in this library, including the batch rules
// (whose emitted level is the realized within-batch step-up cutoff).
struct TestDecision {
  int index = 0;       // 0-based ordinal of the hypothesis in the stream
  double level = 0.0;  // significance level the hypothesis was tested at
  double p_value = 1.0;
  bool rejected = false;
};

// Interface shared by all online testing rules.  A procedure consumes
// p-values one at a time (or one batch at a time), assigns each hypothesis a
// level based only on past decisions, and never revisits a decision.
class Procedure {
 public:
  virtual ~Procedure() = default;

  virtual std::string_view name() const = 0;
  virtual double target_alpha() const = 0;
  virtual int horizon() const = 0;
  virtual int tests_consumed() const = 0;

  // Peek at the level the next hypothesis would be tested at, without
  // consuming it.  Throws BudgetError once the horizon is exhausted.
  virtual double next_level() const = 0;

  virtual TestDecision test_one(double p_value) = 0;

  // Consume a batch.  Sequential procedures process the batch element-wise;
  // batch procedures assign one budget level to the whole batch.
  virtual std::vector<TestDecision> test_batch(std::span<const double> p_values) {
    if (p_values.empty()) throw DomainError("batch must be non-empty");
    std::vector<TestDecision> decisions;
    decisions.reserve(p_values.size());
    for (double p : p_values) decisions.push_back(test_one(p));
    return decisions;
  }

  virtual bool batch_oriented() const { return false; }
};

// Common bookkeeping for the fully sequential rules: horizon accounting,
// input validation, and the peek/consume split.  Subclasses implement
// level_for_next() (pure in the state) and absorb() (state update after a
// decision).
class SequentialProcedure : public Procedure {
 public:
  double target_alpha() const final { return alpha_; }
  int horizon() const final { return n_bound_; }
  int tests_consumed() const final { return consumed_; }

  double next_level() const final {
    check_budget();
    return clamp01(level_for_next());
  }

  TestDecision test_one(double p_value) final {
    if (!(p_value >= 0.0 && p_value <= 1.0)) throw DomainError("p-value must lie in [0, 1]");
    check_budget();
    const double level = clamp01(level_for_next());
    TestDecision decision{consumed_, level, p_value, p_value <= level};
    absorb(p_value, decision.rejected);
    ++consumed_;
    return decision;
  }

 protected:
  SequentialProcedure(double alpha, int n_bound)
      : alpha_(alpha), n_bound_(n_bound) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (n_bound < 1) throw DomainError("horizon must be at least 1");
  }

  virtual double level_for_next() const = 0;
  virtual void absorb(double p_value, bool rejected) = 0;

  void check_budget() const {
    if (consumed_ >= n_bound_) throw BudgetError("hypothesis horizon exhausted");
  }

  static double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

  double alpha_;
  int n_bound_;
  int consumed_ = 0;
};

// Significance thresholds multiply a discount sequence by the discovery
// count: level_i = alpha * gamma_i * (D(i-1) + 1), where D(i-1) is the
// number of rejections among the first i-1 hypotheses.
class Lond final : public SequentialProcedure {
 public:
  Lond(double alpha, int n_bound, GammaSeq gamma)
      : SequentialProcedure(alpha, n_bound), gamma_(std::move(gamma)) {
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
  }
  static Lond with_defaults(double alpha, int n_bound) {
    return Lond(alpha, n_bound, make_gamma(GammaKind::kConstant, n_bound));
  }

  std::string_view name() const override { return "lond"; }

 protected:
  double level_for_next() const override {
    return alpha_ * gamma_.values[static_cast<std::size_t>(consumed_)] *
           static_cast<double>(discoveries_ + 1);
  }
  void absorb(double, bool rejected) override {
    if (rejected) ++discoveries_;
  }

 private:
  GammaSeq gamma_;
  int discoveries_ = 0;
};

// Wealth-recycling rule driven by rejection times:
//   level_t = gamma_t * w0 + b0 * gamma_{t - tau_1} + alpha * sum_{j>=2} gamma_{t - tau_j}
// with initial wealth w0 and first-rejection payout b0 (default alpha - w0).
class Lord final : public SequentialProcedure {
 public:
  Lord(double alpha, int n_bound, GammaSeq gamma, double w0, double b0)
      : SequentialProcedure(alpha, n_bound),
        gamma_(std::move(gamma)),
        w0_(w0),
        b0_(b0) {
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
    if (!(w0 >= 0.0)) throw DomainError("initial wealth must be non-negative");
  }
  static Lord with_defaults(double alpha, int n_bound) {
    return Lord(alpha, n_bound, make_gamma(GammaKind::kLordLog, n_bound), alpha / 10.0,
                alpha - alpha / 10.0);
  }

  std::string_view name() const override { return "lord"; }

 protected:
  double level_for_next() const override {
    const int t = consumed_ + 1;  // 1-based time of the upcoming test
    double level = gamma_.values[static_cast<std::size_t>(t - 1)] * w0_;
    for (std::size_t j = 0; j < rejection_times_.size(); ++j) {
      const int offset = t - rejection_times_[j];
      const double payout = (j == 0) ? b0_ : alpha_;
      level += payout * gamma_.values[static_cast<std::size_t>(offset - 1)];
    }
    return level;
  }
  void absorb(double, bool rejected) override {
    if (rejected) rejection_times_.push_back(consumed_ + 1);
  }

 private:
  GammaSeq gamma_;
  double w0_;
  double b0_;
  std::vector<int> rejection_times_;  // 1-based
};

// Adaptive wealth rule that skips the candidacy fraction: p-values above the
// candidacy threshold lambda are known not to be rejected, so the discount
// index only advances on candidates.  With rejection times tau_j and
// candidate counts C_j+ strictly after each tau_j,
//   level_t = min(lambda, (1 - lambda) * [ w0 * gamma_{t - C0+}
//             + (alpha - w0) * gamma_{t - tau_1 - C1+}
//             + alpha * sum_{j>=2} gamma_{t - tau_j - Cj+} ]).
class Saffron final : public SequentialProcedure {
 public:
  Saffron(double alpha, int n_bound, GammaSeq gamma, double lambda, double w0)
      : SequentialProcedure(alpha, n_bound),
        gamma_(std::move(gamma)),
        lambda_(lambda),
        w0_(w0) {
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    if (!(w0 >= 0.0)) throw DomainError("initial wealth must be non-negative");
  }
  static Saffron with_defaults(double alpha, int n_bound) {
    return Saffron(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound), 0.5,
                   alpha / 2.0);
  }

  std::string_view name() const override { return "saffron"; }

 protected:
  double level_for_next() const override {
    const int t = consumed_ + 1;
    const int idx0 = t - candidates_total_;
    double value = w0_ * gamma_.values[static_cast<std::size_t>(idx0 - 1)];
    for (std::size_t j = 0; j < rejections_.size(); ++j) {
      const int idx = t - rejections_[j].time - rejections_[j].candidates_after;
      const double payout = (j == 0) ? (alpha_ - w0_) : alpha_;
      value += payout * gamma_.values[static_cast<std::size_t>(idx - 1)];
    }
    return std::min(lambda_, (1.0 - lambda_) * value);
  }
  void absorb(double p_value, bool rejected) override {
    const bool candidate = p_value <= lambda_;
    if (candidate) {
      ++candidates_total_;
      for (auto& r : rejections_) ++r.candidates_after;
    }
    if (rejected) rejections_.push_back({consumed_ + 1, 0});
  }

 private:
  struct Rejection {
    int time;              // 1-based rejection time tau_j
    int candidates_after;  // candidates strictly after tau_j
  };
  GammaSeq gamma_;
  double lambda_;
  double w0_;
  int candidates_total_ = 0;
  std::vector<Rejection> rejections_;
};

// Adaptive-discarding wealth rule: p-values above the discarding threshold
// tau are dropped from the budget accounting entirely (conservative nulls),
// and candidacy applies at lambda * tau.  With S* the selected count
// (p <= tau), kappa_j the selected count up to each rejection plus one, and
// payout (1 - lambda) * tau * alpha,
//   level_t = min(lambda * tau, w0 * gamma_{S*+1-C0+}
//             + (payout - w0) * gamma_{S*+1-kappa_1-C1+}
//             + payout * sum_{j>=2} gamma_{S*+1-kappa_j-Cj+}).
class Addis final : public SequentialProcedure {
 public:
  Addis(double alpha, int n_bound, GammaSeq gamma, double lambda, double tau, double w0)
      : SequentialProcedure(alpha, n_bound),
        gamma_(std::move(gamma)),
        lambda_(lambda),
        tau_(tau),
        w0_(w0) {
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
    if (!(w0 >= 0.0)) throw DomainError("initial wealth must be non-negative");
  }
  static Addis with_defaults(double alpha, int n_bound) {
    return Addis(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound), 0.5, 0.5,
                 0.5 * 0.5 * alpha / 2.0);
  }

  std::string_view name() const override { return "addis"; }

 protected:
  double level_for_next() const override {
    const int idx0 = selected_total_ + 1 - candidates_total_;
    const double payout = (1.0 - lambda_) * tau_ * alpha_;
    double value = w0_ * gamma_.values[static_cast<std::size_t>(idx0 - 1)];
    for (std::size_t j = 0; j < rejections_.size(); ++j) {
      const int idx =
          selected_total_ + 1 - rejections_[j].kappa - rejections_[j].candidates_after;
      const double coefficient = (j == 0) ? (payout - w0_) : payout;
      value += coefficient * gamma_.values[static_cast<std::size_t>(idx - 1)];
    }
    return std::min(lambda_ * tau_, value);
  }
  void absorb(double p_value, bool rejected) override {
    const bool selected = p_value <= tau_;
    const bool candidate = p_value <= lambda_ * tau_;
    if (candidate) {
      for (auto& r : rejections_) ++r.candidates_after;
    }
    if (rejected) rejections_.push_back({consumed_ + 1, selected_total_ + 1, 0});
    if (selected) ++selected_total_;
    if (candidate) ++candidates_total_;
  }

 private:
  struct Rejection {
    int time;              // 1-based rejection time tau_j
    int kappa;             // selected count up to tau_j - 1, plus one
    int candidates_after;  // candidates strictly after tau_j
  };
  GammaSeq gamma_;
  double lambda_;
  double tau_;
  double w0_;
  int selected_total_ = 0;
  int candidates_total_ = 0;
  std::vector<Rejection> rejections_;
};

// Alpha-spending variant of the discarding rule; controls the familywise
// error rate.  No wealth is earned back on rejection:
//   level_t = min(lambda, (tau - lambda) * alpha * gamma_{S* - C0+ + 1})
// where S* counts p <= tau and C0+ counts p <= lambda among past tests.
class AddisSpending final : public SequentialProcedure {
 public:
  AddisSpending(double alpha, int n_bound, GammaSeq gamma, double lambda, double tau)
      : SequentialProcedure(alpha, n_bound),
        gamma_(std::move(gamma)),
        lambda_(lambda),
        tau_(tau) {
    if (gamma_.size() != n_bound) throw DomainError("gamma length must equal the horizon");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
    if (!(lambda < tau)) throw DomainError("lambda must be below tau");
  }
  static AddisSpending with_defaults(double alpha, int n_bound) {
    return AddisSpending(alpha, n_bound, make_gamma(GammaKind::kPowerLaw, n_bound), 0.25,
                         0.5);
  }

  std::string_view name() const override { return "addis_spending"; }

 protected:
  double level_for_next() const override {
    const int idx = selected_total_ - candidates_total_;  // 0-based gamma index
    return std::min(lambda_,
                    (tau_ - lambda_) * alpha_ * gamma_.values[static_cast<std::size_t>(idx)]);
  }
  void absorb(double p_value, bool) override {
    if (p_value <= tau_) ++selected_total_;
    if (p_value <= lambda_) ++candidates_total_;
  }

 private:
  GammaSeq gamma_;
  double lambda_;
  double tau_;
  int selected_total_ = 0;
  int candidates_total_ = 0;
};

// Constant-level rules expressed as sequential procedures, so comparators
// share the peek/consume interface (their next level never changes).
class FixedLevel final : public SequentialProcedure {
 public:
  FixedLevel(std::string_view name, double alpha, int n_bound, double level)
      : SequentialProcedure(alpha, n_bound), name_(name), level_(level) {}

  static FixedLevel uncorrected_rule(double alpha, int n_bound) {
    return FixedLevel("uncorrected", alpha, n_bound, alpha);
  }
  static FixedLevel bonferroni(double alpha, int n_bound) {
    return FixedLevel("bonferroni", alpha, n_bound, alpha / static_cast<double>(n_bound));
  }

  std::string_view name() const override { return name_; }

 protected:
  double level_for_next() const override { return level_; }
  void absorb(double, bool) override {}

 private:
  std::string_view name_;
  double level_;
};

}  // namespace onlinetrial
