#include "sanne/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sanne {

namespace {

int label_or_fail(const LabelMap& labels, int id) {
  const auto it = labels.label_of.find(id);
  if (it == labels.label_of.end()) {
    throw DataError("no label for node " + std::to_string(id));
  }
  return it->second;
}

void check_rows(const Tensor& embeddings, const std::vector<int>& ids) {
  for (int id : ids) {
    if (id < 0 || id >= embeddings.shape[0]) {
      throw DataError("no embedding row for node " + std::to_string(id));
    }
  }
}

}  // namespace

int Classifier::predict(const float* row) const {
  int best = 0;
  double best_score = -1e300;
  for (int c = 0; c < num_classes; ++c) {
    double s = bias[c];
    const double* w = weights.data() + static_cast<std::size_t>(c) * dim;
    for (int j = 0; j < dim; ++j) s += w[j] * (feature_scale * row[j]);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

Classifier train_logreg(const Tensor& embeddings, const LabelMap& labels,
                        const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                        double lambda, int epochs, double lr) {
  if (train_ids.empty()) throw DataError("train_logreg: empty train set");
  if (lambda < 0) throw DataError("train_logreg: lambda must be >= 0");
  check_rows(embeddings, train_ids);
  check_rows(embeddings, val_ids);

  const int d = embeddings.shape[1];
  const int num_classes = labels.num_classes();
  const int n = static_cast<int>(train_ids.size());

  double sq = 0.0;
  for (int id : train_ids) {
    const float* row = embeddings.row(id);
    for (int j = 0; j < d; ++j) sq += static_cast<double>(row[j]) * row[j];
  }
  const double rms = std::sqrt(sq / (static_cast<double>(n) * d));
  const double scale = rms > 0.0 ? 1.0 / rms : 1.0;

  Classifier clf;
  clf.num_classes = num_classes;
  clf.dim = d;
  clf.lambda = lambda;
  clf.feature_scale = scale;
  clf.weights.assign(static_cast<std::size_t>(num_classes) * d, 0.0);
  clf.bias.assign(num_classes, 0.0);

  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = label_or_fail(labels, train_ids[i]);

  Classifier best = clf;
  double best_val = -1.0;
  std::vector<double> probs(num_classes);
  std::vector<double> gw(clf.weights.size());
  std::vector<double> gb(num_classes);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const float* row = embeddings.row(train_ids[i]);
      double mx = -1e300;
      for (int c = 0; c < num_classes; ++c) {
        double s = clf.bias[c];
        const double* w = clf.weights.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) s += w[j] * (scale * row[j]);
        probs[c] = s;
        mx = std::max(mx, s);
      }
      double sum = 0.0;
      for (int c = 0; c < num_classes; ++c) {
        probs[c] = std::exp(probs[c] - mx);
        sum += probs[c];
      }
      for (int c = 0; c < num_classes; ++c) {
        const double err = probs[c] / sum - (c == y[i] ? 1.0 : 0.0);
        double* g = gw.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) g[j] += err * (scale * row[j]);
        gb[c] += err;
      }
    }
    // Proximal step for the L2 term: stable for any lambda, same optimum.
    const double inv_n = 1.0 / n;
    const double shrink = 1.0 / (1.0 + lr * lambda);
    for (std::size_t i = 0; i < gw.size(); ++i) {
      clf.weights[i] = (clf.weights[i] - lr * gw[i] * inv_n) * shrink;
    }
    for (int c = 0; c < num_classes; ++c) clf.bias[c] -= lr * gb[c] * inv_n;

    const double val_acc = val_ids.empty() ? 0.0 : accuracy(clf, embeddings, labels, val_ids);
    if (val_acc > best_val) {
      best_val = val_acc;
      best = clf;
      best.best_epoch = epoch;
    }
  }
  return val_ids.empty() ? clf : best;
}

double logreg_loss(const Classifier& clf, const Tensor& embeddings, const LabelMap& labels,
                   const std::vector<int>& ids) {
  if (ids.empty()) throw DataError("logreg_loss: empty id set");
  check_rows(embeddings, ids);
  double loss = 0.0;
  std::vector<double> scores(clf.num_classes);
  for (int id : ids) {
    const float* row = embeddings.row(id);
    const int y = label_or_fail(labels, id);
    double mx = -1e300;
    for (int c = 0; c < clf.num_classes; ++c) {
      double s = clf.bias[c];
      const double* w = clf.weights.data() + static_cast<std::size_t>(c) * clf.dim;
      for (int j = 0; j < clf.dim; ++j) s += w[j] * (clf.feature_scale * row[j]);
      scores[c] = s;
      mx = std::max(mx, s);
    }
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - mx);
    loss += (mx + std::log(sum)) - scores[y];
  }
  loss /= static_cast<double>(ids.size());
  double reg = 0.0;
  for (double w : clf.weights) reg += w * w;
  return loss + 0.5 * clf.lambda * reg;
}

double accuracy(const Classifier& clf, const Tensor& embeddings, const LabelMap& labels,
                const std::vector<int>& ids) {
  if (ids.empty()) throw DataError("accuracy: empty id set");
  check_rows(embeddings, ids);
  std::int64_t hits = 0;
  for (int id : ids) {
    if (clf.predict(embeddings.row(id)) == label_or_fail(labels, id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ids.size());
}

LogregSelection select_logreg(const Tensor& embeddings, const LabelMap& labels,
                              const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                              const LogregOptions& opts) {
  LogregSelection best;
  best.val_accuracy = -1.0;
  for (double lambda : opts.lambda_grid) {
    Classifier clf = train_logreg(embeddings, labels, train_ids, val_ids, lambda, opts.epochs,
                                  opts.lr);
    const double val_acc = accuracy(clf, embeddings, labels, val_ids);
    if (val_acc > best.val_accuracy) {
      best.val_accuracy = val_acc;
      best.clf = std::move(clf);
      best.lambda = lambda;
    }
  }
  return best;
}

double validation_accuracy(const Tensor& embeddings, const LabelMap& labels,
                           const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                           const LogregOptions& opts) {
  return select_logreg(embeddings, labels, train_ids, val_ids, opts).val_accuracy;
}

// --------------------------------------------------------------- statistics

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log(1.0 - x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, int dof) {
  if (dof < 1) throw std::invalid_argument("student_t_two_tailed_p: dof must be >= 1");
  const double x = dof / (dof + t * t);
  return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("paired_ttest: need two equal-length vectors of size >= 2");
  }
  const int n = static_cast<int>(a.size());
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1));

  TTestResult r;
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.degenerate = true;
      r.t = mean > 0 ? 1e300 : -1e300;
      r.p = 0.0;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_tailed_p(r.t, n - 1);
  return r;
}

}  // namespace sanne
