#include "svcal/softtrain.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "svcal/error.hpp"

namespace svcal {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_weights(const LinearSoftModel& model, const Eigen::MatrixXd& features) {
  if (model.weights.rows() != features.cols() || model.weights.cols() != 2) {
    fail(ErrorCode::DimensionMismatch,
         "weights " + shape(model.weights) + " do not fit features " + shape(features) + " with 2 classes");
  }
}

double form_scale(LossForm form, Eigen::Index n) { return form == LossForm::Mean ? 1.0 / static_cast<double>(n) : 1.0; }

using Objective = std::function<double(const Eigen::MatrixXd&)>;
using Gradient = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

LinearSoftModel descend(Eigen::Index d, const Objective& loss_at, const Gradient& grad_at, const TrainConfig& config) {
  if (!(config.learning_rate > 0.0) || config.epochs < 0) {
    fail(ErrorCode::InvalidArgument, "learning rate must be positive and epochs non-negative");
  }
  LinearSoftModel model;
  model.loss_form = config.loss_form;
  model.weights = Eigen::MatrixXd::Zero(d, 2);

  double loss = loss_at(model.weights);
  if (!std::isfinite(loss)) fail(ErrorCode::Diverged, "initial loss is not finite");
  model.training_trace.push_back({0, loss});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const Eigen::MatrixXd grad = grad_at(model.weights);
    const double g2 = grad.squaredNorm();
    if (!std::isfinite(g2)) fail(ErrorCode::Diverged, "gradient is not finite at epoch " + std::to_string(epoch));
    if (g2 == 0.0) break;

    double step = config.learning_rate;
    bool accepted = false;
    while (step >= kMinStep) {
      Eigen::MatrixXd trial = model.weights - step * grad;
      const double trial_loss = loss_at(trial);
      if (std::isfinite(trial_loss) && trial_loss <= loss - kArmijo * step * g2) {
        model.weights = std::move(trial);
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at machine precision
    model.training_trace.push_back({epoch, loss});
  }
  return model;
}

}  // namespace

void SoftTrainProblem::validate() const {
  if (features.rows() < 1 || features.cols() < 1) fail(ErrorCode::DimensionMismatch, "empty feature matrix");
  if (targets.rows() != features.rows() || targets.cols() != 2) {
    fail(ErrorCode::DimensionMismatch,
         "targets " + shape(targets) + " do not match features " + shape(features) + " with 2 classes");
  }
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    const double s = targets.row(i).sum();
    if (std::abs(s - 1.0) > 1e-12 || targets.row(i).minCoeff() < 0.0) {
      fail(ErrorCode::InvalidProbability, "target row " + std::to_string(i) + " is not a distribution");
    }
  }
}

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd p(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double top = scores.row(i).maxCoeff();
    p.row(i) = (scores.row(i).array() - top).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

double soft_cross_entropy(const LinearSoftModel& model, const SoftTrainProblem& problem, LossForm form) {
  check_weights(model, problem.features);
  if (problem.targets.rows() != problem.features.rows() || problem.targets.cols() != 2) {
    fail(ErrorCode::DimensionMismatch, "targets " + shape(problem.targets) + " do not match features");
  }
  const Eigen::MatrixXd p = row_softmax(problem.features * model.weights);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) loss -= problem.targets(i, c) * safe_log(p(i, c));
  }
  return loss * form_scale(form, p.rows());
}

Eigen::MatrixXd gradient(const LinearSoftModel& model, const SoftTrainProblem& problem, LossForm form) {
  check_weights(model, problem.features);
  if (problem.targets.rows() != problem.features.rows() || problem.targets.cols() != 2) {
    fail(ErrorCode::DimensionMismatch, "targets " + shape(problem.targets) + " do not match features");
  }
  const Eigen::MatrixXd residual = row_softmax(problem.features * model.weights) - problem.targets;
  Eigen::MatrixXd g = problem.features.transpose() * residual;
  return form == LossForm::Mean ? Eigen::MatrixXd(g * form_scale(form, problem.features.rows())) : g;
}

LinearSoftModel train(const SoftTrainProblem& problem, const TrainConfig& config) {
  problem.validate();
  LinearSoftModel probe;
  auto loss_at = [&](const Eigen::MatrixXd& w) {
    probe.weights = w;
    return soft_cross_entropy(probe, problem, config.loss_form);
  };
  auto grad_at = [&](const Eigen::MatrixXd& w) {
    probe.weights = w;
    return gradient(probe, problem, config.loss_form);
  };
  return descend(problem.features.cols(), loss_at, grad_at, config);
}

LinearSoftModel train_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                               const TrainConfig& config) {
  if (features.rows() < 1 || features.cols() < 1 || static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    fail(ErrorCode::DimensionMismatch, "need one label per feature row");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) fail(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }
  const double scale = form_scale(config.loss_form, features.rows());

  auto loss_at = [&](const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd p = row_softmax(features * w);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) loss -= safe_log(p(i, labels[static_cast<std::size_t>(i)]));
    return loss * scale;
  };
  auto grad_at = [&](const Eigen::MatrixXd& w) {
    Eigen::MatrixXd residual = row_softmax(features * w);
    for (Eigen::Index i = 0; i < residual.rows(); ++i) residual(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    Eigen::MatrixXd g = features.transpose() * residual;
    return config.loss_form == LossForm::Mean ? Eigen::MatrixXd(g * scale) : g;
  };
  return descend(features.cols(), loss_at, grad_at, config);
}

Probs2 predict_proba(const LinearSoftModel& model, const Eigen::RowVectorXd& row) {
  if (row.size() != model.weights.rows() || model.weights.cols() != 2) {
    fail(ErrorCode::DimensionMismatch, "feature row of length " + std::to_string(row.size()) +
                                           " for weights " + shape(model.weights));
  }
  const Eigen::MatrixXd p = row_softmax(row * model.weights);
  return {p(0, 0), p(0, 1)};
}

}  // namespace svcal
