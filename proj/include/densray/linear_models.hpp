#pragma once

#include "densray/densray.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace densray {

struct Hyperparams {
  double c = 1.0;         ///< weight of the data term
  double epsilon = 0.1;   ///< SVR insensitivity, in standardized target units
  int epochs = 100;       ///< passes (SGD) or iterations (logreg)
  std::uint64_t seed = 0;
  bool balance_classes = false;  ///< inverse-frequency example weights
};

/// Learning-rate schedule id written into model files.
inline constexpr std::string_view kPegasosSchedule = "pegasos";
inline constexpr std::string_view kLipschitzSchedule = "lipschitz";

struct LinearModel {
  Vector weights;
  double bias = 0.0;
  Method kind = Method::kSvm;
  Hyperparams hp;
  std::string signal_name = "signal";

  double decision(const Eigen::Ref<const Vector>& x) const { return weights.dot(x) + bias; }
};

/// Per-epoch objective values of the epoch-end averaged iterate.
using TrainTrace = std::vector<double>;

/// Training data: one row per example.
struct LabeledRows {
  RowMatrix x;
  Vector y;
};

LabeledRows binary_rows(const Embeddings& emb, const BinarySignal& sig);
LabeledRows continuous_rows(const Embeddings& emb, const ContinuousSignal& sig);

/// L2-regularized hinge loss, (1/2)||w||^2 + C sum max(0, 1 - y (w.x + b)),
/// minimized by Pegasos-style SGD (eta_t = 1 / (lambda t), lambda = 1 / (C n))
/// over seeded per-epoch shuffles, with iterates projected onto the ball that
/// must contain the optimum. Returns the uniform average of the iterates.
/// Positives are +1.
LinearModel train_svm(const Embeddings& emb, const BinarySignal& sig, const Hyperparams& hp = {},
                      TrainTrace* trace = nullptr);
LinearModel train_svm(const LabeledRows& data, const Hyperparams& hp = {}, TrainTrace* trace = nullptr);

/// L2-regularized epsilon-insensitive regression on standardized targets;
/// the standardization is folded back into (w, b). Same driver as train_svm,
/// but returns the average with iterate t weighted by t.
LinearModel train_svr(const Embeddings& emb, const ContinuousSignal& sig, const Hyperparams& hp = {},
                      TrainTrace* trace = nullptr);
LinearModel train_svr(const LabeledRows& data, const Hyperparams& hp = {}, TrainTrace* trace = nullptr);

/// L2-regularized logistic regression, (1/2)||w||^2 + C sum NLL, by full-batch
/// gradient descent with step 1/L for the smoothness bound L. predict_proba is
/// the probability of the positive class.
LinearModel train_logreg(const Embeddings& emb, const BinarySignal& sig, const Hyperparams& hp = {},
                         TrainTrace* trace = nullptr);
LinearModel train_logreg(const LabeledRows& data, const Hyperparams& hp = {}, TrainTrace* trace = nullptr);

double predict_proba(const LinearModel& m, const Eigen::Ref<const Vector>& x);
double sigmoid(double z);

/// Objectives, exposed for tests and traces. `params` is (w, b) stacked.
double hinge_objective(const LabeledRows& data, const Vector& params, double c,
                       const Vector* example_weights = nullptr);
double logreg_objective(const LabeledRows& data, const Vector& params, double c,
                        const Vector* example_weights = nullptr);
Vector logreg_gradient(const LabeledRows& data, const Vector& params, double c,
                       const Vector* example_weights = nullptr);

/// Column 0 = w / ||w||, the rest from complete_orthogonal(seed).
Rotation model_to_rotation(const LinearModel& m, std::uint64_t seed);

/// Model text format:
///   model <d> <kind> <signal_name> C=<c> epsilon=<e> epochs=<n> schedule=<id> seed=<s> balance=<0|1>
///   <bias>
///   <w_1 ... w_d>
void save_model(const std::filesystem::path& path, const LinearModel& m);
std::string format_model(const LinearModel& m);
LinearModel load_model(const std::filesystem::path& path);
LinearModel parse_model(std::string_view text);

}  // namespace densray
