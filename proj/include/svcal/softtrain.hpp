#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svcal/numeric.hpp"

namespace svcal {

// n x d features (include a constant column for an intercept) and n x 2 soft targets.
struct SoftTrainProblem {
  Eigen::MatrixXd features;
  Eigen::MatrixXd targets;

  // Throws DimensionMismatch / InvalidProbability when the invariants fail.
  void validate() const;
};

enum class LossForm { Sum, Mean };

struct TraceEntry {
  int epoch = 0;
  double loss = 0.0;
};

struct LinearSoftModel {
  Eigen::MatrixXd weights;  // d x 2
  std::vector<TraceEntry> training_trace;
  LossForm loss_form = LossForm::Mean;
};

struct TrainConfig {
  double learning_rate = 1.0;  // initial step of each backtracking search
  int epochs = 200;
  std::uint64_t seed = 0;  // weights start at zero; kept for reproducible data handling
  LossForm loss_form = LossForm::Mean;
};

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& scores);

/// -sum_i sum_c target(i,c) log p(i,c), p = row_softmax(X W) clamped at 1e-12.
double soft_cross_entropy(const LinearSoftModel& model, const SoftTrainProblem& problem,
                          LossForm form = LossForm::Sum);

/// X^T (P - T), divided by n for the mean form.
Eigen::MatrixXd gradient(const LinearSoftModel& model, const SoftTrainProblem& problem,
                         LossForm form = LossForm::Sum);

/// Full-batch gradient descent with Armijo backtracking from zero weights.
/// Throws Diverged if the loss is not finite.
LinearSoftModel train(const SoftTrainProblem& problem, const TrainConfig& config);

/// Multinomial logistic regression on integer labels, same optimiser.
LinearSoftModel train_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                               const TrainConfig& config);

Probs2 predict_proba(const LinearSoftModel& model, const Eigen::RowVectorXd& row);

}  // namespace svcal
