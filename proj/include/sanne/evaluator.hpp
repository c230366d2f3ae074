#pragma once

#include <span>
#include <vector>

#include "sanne/graph.hpp"
#include "sanne/tensor.hpp"

namespace sanne {

// Multinomial L2-regularized logistic regression trained by full-batch
// gradient descent. Inputs are pre-scaled by a single factor fitted on the
// training rows so the fixed learning rate behaves across embedding scales.
struct Classifier {
  int num_classes = 0;
  int dim = 0;
  std::vector<double> weights;  // [num_classes, dim]
  std::vector<double> bias;     // [num_classes]
  double lambda = 0.0;
  double feature_scale = 1.0;
  int best_epoch = -1;

  // Argmax class; ties resolved toward the lowest class index.
  int predict(const float* row) const;
};

Classifier train_logreg(const Tensor& embeddings, const LabelMap& labels,
                        const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                        double lambda, int epochs, double lr);

// Mean cross-entropy + (lambda/2)*||W||^2 of a classifier on the given ids
// (exposed for the convexity/monotonicity checks).
double logreg_loss(const Classifier& clf, const Tensor& embeddings, const LabelMap& labels,
                   const std::vector<int>& ids);

double accuracy(const Classifier& clf, const Tensor& embeddings, const LabelMap& labels,
                const std::vector<int>& ids);

struct LogregOptions {
  std::vector<double> lambda_grid{1e-4, 1e-3, 1e-2};
  int epochs = 1000;
  double lr = 0.1;
};

struct LogregSelection {
  Classifier clf;
  double val_accuracy = 0.0;
  double lambda = 0.0;
};

// Grid over lambda, best epoch within each fit, selected on validation.
LogregSelection select_logreg(const Tensor& embeddings, const LabelMap& labels,
                              const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                              const LogregOptions& opts);

double validation_accuracy(const Tensor& embeddings, const LabelMap& labels,
                           const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                           const LogregOptions& opts);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  // Set when the paired differences have zero spread around a nonzero mean;
  // the t statistic is undefined there.
  bool degenerate = false;
};

// Two-tailed paired t-test over aligned accuracy vectors.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

// Two-tailed p-value of Student's t with `dof` degrees of freedom.
double student_t_two_tailed_p(double t, int dof);

// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace sanne
