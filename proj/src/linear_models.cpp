#include "densray/linear_models.hpp"

#include "densray/error.hpp"
#include "densray/seed.hpp"
#include "densray/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace densray {

LabeledRows binary_rows(const Embeddings& emb, const BinarySignal& sig) {
  if (sig.positives.empty() || sig.negatives.empty())
    throw DataError("signal '" + sig.name + "': both classes must be non-empty");
  std::vector<std::string> tokens = sig.positives;
  tokens.insert(tokens.end(), sig.negatives.begin(), sig.negatives.end());
  (void)Vocabulary(tokens);  // rejects duplicates and class overlap
  LabeledRows out{gather_rows(emb, tokens), Vector(static_cast<Eigen::Index>(tokens.size()))};
  const auto np = static_cast<Eigen::Index>(sig.positives.size());
  out.y.head(np).setOnes();
  out.y.tail(out.y.size() - np).setConstant(-1.0);
  return out;
}

LabeledRows continuous_rows(const Embeddings& emb, const ContinuousSignal& sig) {
  std::vector<std::string> tokens;
  Vector y(static_cast<Eigen::Index>(sig.scores.size()));
  for (std::size_t i = 0; i < sig.scores.size(); ++i) {
    tokens.push_back(sig.scores[i].first);
    y[static_cast<Eigen::Index>(i)] = sig.scores[i].second;
  }
  (void)Vocabulary(tokens);
  return LabeledRows{gather_rows(emb, tokens), y};
}

namespace {

void check_binary_labels(const LabeledRows& data) {
  if (data.x.rows() != data.y.size()) throw UsageError("label count does not match rows");
  bool pos = false;
  bool neg = false;
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] == 1.0)
      pos = true;
    else if (data.y[i] == -1.0)
      neg = true;
    else
      throw UsageError("binary labels must be -1 or +1");
  }
  if (!pos || !neg) throw DataError("both classes must be non-empty");
}

Vector example_weights(const LabeledRows& data, bool balance) {
  Vector w = Vector::Ones(data.y.size());
  if (!balance) return w;
  const double n = static_cast<double>(data.y.size());
  const double np = static_cast<double>((data.y.array() > 0.0).count());
  const double nn = n - np;
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = n / (2.0 * (data.y[i] > 0.0 ? np : nn));
  return w;
}

// x extended by a constant 1 feature for the bias.
double augmented_dot(const Vector& params, const RowMatrix& x, Eigen::Index i) {
  const Eigen::Index d = x.cols();
  return x.row(i).dot(params.head(d)) + params[d];
}

std::mt19937_64 trainer_rng(std::uint64_t seed) {
  return std::mt19937_64(derive_seed(seed, {kTrainerStream}));
}

enum class Averaging { kUniform, kLinear };

// Shared Pegasos driver. `violation(i, margin)` returns the signed step
// coefficient applied to the augmented x_i when example i is active, or 0.
template <typename Violation, typename Objective>
Vector pegasos(const LabeledRows& data, const Vector& weights, const Hyperparams& hp,
               Averaging averaging, Violation violation, Objective objective, TrainTrace* trace) {
  if (hp.c <= 0.0 || !std::isfinite(hp.c)) throw UsageError("C must be positive");
  if (hp.epochs < 1) throw UsageError("epochs must be positive");
  const Eigen::Index n = data.x.rows();
  const Eigen::Index d = data.x.cols();
  const double lambda = 1.0 / (hp.c * static_cast<double>(n));

  Vector w = Vector::Zero(d + 1);
  Vector avg = Vector::Zero(d + 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto rng = trainer_rng(hp.seed);
  if (trace) trace->clear();
  // The optimum lies in the ball where its regularizer alone stays below the
  // objective at zero.
  const double radius = std::sqrt(2.0 * objective(Vector::Zero(d + 1)));

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double coef = violation(i, augmented_dot(w, data.x, i));
      w *= 1.0 - 1.0 / static_cast<double>(t);
      if (coef != 0.0) {
        const double step = eta * coef * weights[i];
        w.head(d) += step * data.x.row(i).transpose();
        w[d] += step;
      }
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      // kLinear weights iterate t proportionally to t.
      const double rate = averaging == Averaging::kUniform ? 1.0 / static_cast<double>(t)
                                                           : 2.0 / static_cast<double>(t + 1);
      avg += rate * (w - avg);
    }
    const double value = objective(avg);
    if (!std::isfinite(value) || !avg.allFinite()) throw NumericError("training diverged");
    if (trace) trace->push_back(value);
  }
  return avg;
}

}  // namespace

double hinge_objective(const LabeledRows& data, const Vector& params, double c,
                       const Vector* example_weights) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const double s = example_weights ? (*example_weights)[i] : 1.0;
    loss += s * std::max(0.0, 1.0 - data.y[i] * augmented_dot(params, data.x, i));
  }
  return 0.5 * params.squaredNorm() + c * loss;
}

LinearModel train_svm(const LabeledRows& data, const Hyperparams& hp, TrainTrace* trace) {
  check_binary_labels(data);
  const Vector weights = example_weights(data, hp.balance_classes);
  const Vector params = pegasos(
      data, weights, hp, Averaging::kUniform,
      [&](Eigen::Index i, double score) { return data.y[i] * score < 1.0 ? data.y[i] : 0.0; },
      [&](const Vector& p) { return hinge_objective(data, p, hp.c, &weights); }, trace);
  const Eigen::Index d = data.x.cols();
  return LinearModel{params.head(d), params[d], Method::kSvm, hp, "signal"};
}

LinearModel train_svm(const Embeddings& emb, const BinarySignal& sig, const Hyperparams& hp,
                      TrainTrace* trace) {
  LinearModel m = train_svm(binary_rows(emb, sig), hp, trace);
  m.signal_name = sig.name;
  return m;
}

LinearModel train_svr(const LabeledRows& data, const Hyperparams& hp, TrainTrace* trace) {
  if (data.x.rows() < 2) throw DataError("SVR needs at least 2 labeled words");
  if (data.x.rows() != data.y.size()) throw UsageError("label count does not match rows");
  if (hp.epsilon < 0.0) throw UsageError("epsilon must be non-negative");
  const double mean = data.y.mean();
  const double sd = std::sqrt((data.y.array() - mean).square().mean());
  if (!(sd > 0.0)) throw DataError("SVR targets are constant");

  LabeledRows z{data.x, (data.y.array() - mean) / sd};
  const Vector weights = Vector::Ones(z.y.size());
  const double eps = hp.epsilon;
  const auto objective = [&](const Vector& p) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.x.rows(); ++i)
      loss += std::max(0.0, std::abs(z.y[i] - augmented_dot(p, z.x, i)) - eps);
    return 0.5 * p.squaredNorm() + hp.c * loss;
  };
  const Vector params = pegasos(
      z, weights, hp, Averaging::kLinear,
      [&](Eigen::Index i, double score) {
        const double r = z.y[i] - score;
        return std::abs(r) > eps ? (r > 0.0 ? 1.0 : -1.0) : 0.0;
      },
      objective, trace);
  const Eigen::Index d = data.x.cols();
  return LinearModel{sd * params.head(d), sd * params[d] + mean, Method::kSvr, hp, "signal"};
}

LinearModel train_svr(const Embeddings& emb, const ContinuousSignal& sig, const Hyperparams& hp,
                      TrainTrace* trace) {
  LinearModel m = train_svr(continuous_rows(emb, sig), hp, trace);
  m.signal_name = sig.name;
  return m;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {
// log(1 + exp(-m))
double log1pexp_neg(double m) {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}
}  // namespace

double logreg_objective(const LabeledRows& data, const Vector& params, double c,
                        const Vector* example_weights) {
  const Eigen::Index d = data.x.cols();
  double nll = 0.0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const double s = example_weights ? (*example_weights)[i] : 1.0;
    nll += s * log1pexp_neg(data.y[i] * augmented_dot(params, data.x, i));
  }
  return 0.5 * params.head(d).squaredNorm() + c * nll;
}

Vector logreg_gradient(const LabeledRows& data, const Vector& params, double c,
                       const Vector* example_weights) {
  const Eigen::Index d = data.x.cols();
  Vector g = Vector::Zero(d + 1);
  g.head(d) = params.head(d);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const double s = example_weights ? (*example_weights)[i] : 1.0;
    const double target = data.y[i] > 0.0 ? 1.0 : 0.0;
    const double r = c * s * (sigmoid(augmented_dot(params, data.x, i)) - target);
    g.head(d) += r * data.x.row(i).transpose();
    g[d] += r;
  }
  return g;
}

LinearModel train_logreg(const LabeledRows& data, const Hyperparams& hp, TrainTrace* trace) {
  check_binary_labels(data);
  if (hp.c <= 0.0 || !std::isfinite(hp.c)) throw UsageError("C must be positive");
  if (hp.epochs < 1) throw UsageError("epochs must be positive");
  const Vector weights = example_weights(data, hp.balance_classes);
  const Eigen::Index d = data.x.cols();

  // The NLL Hessian is bounded by (1/4) sum s_i x~_i x~_i^T.
  double curvature = 0.0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i)
    curvature += weights[i] * (data.x.row(i).squaredNorm() + 1.0);
  const double step = 1.0 / (1.0 + 0.25 * hp.c * curvature);

  Vector params = Vector::Zero(d + 1);
  if (trace) trace->clear();
  for (int it = 0; it < hp.epochs; ++it) {
    params -= step * logreg_gradient(data, params, hp.c, &weights);
    if (!params.allFinite()) throw NumericError("logistic regression diverged");
    if (trace) trace->push_back(logreg_objective(data, params, hp.c, &weights));
  }
  return LinearModel{params.head(d), params[d], Method::kLogReg, hp, "signal"};
}

LinearModel train_logreg(const Embeddings& emb, const BinarySignal& sig, const Hyperparams& hp,
                         TrainTrace* trace) {
  LinearModel m = train_logreg(binary_rows(emb, sig), hp, trace);
  m.signal_name = sig.name;
  return m;
}

double predict_proba(const LinearModel& m, const Eigen::Ref<const Vector>& x) {
  return sigmoid(m.decision(x));
}

Rotation model_to_rotation(const LinearModel& m, std::uint64_t seed) {
  const double norm = m.weights.norm();
  if (!(norm > 0.0) || !m.weights.allFinite()) throw NumericError("model weights are zero");
  const Vector q = m.weights / norm;
  return Rotation{complete_orthogonal(q, derive_seed(seed, {kCompletionStream})), Vector(), m.kind,
                  m.signal_name};
}

std::string format_model(const LinearModel& m) {
  if (m.signal_name.empty() || has_whitespace(m.signal_name))
    throw UsageError("model signal name must be a non-empty token without whitespace");
  const auto d = static_cast<std::size_t>(m.weights.size());
  const std::string_view schedule = m.kind == Method::kLogReg ? kLipschitzSchedule : kPegasosSchedule;
  std::string out = "model " + std::to_string(d) + " " + std::string(method_name(m.kind)) + " " +
                    m.signal_name + " C=" + format_double(m.hp.c) + " epsilon=" +
                    format_double(m.hp.epsilon) + " epochs=" + std::to_string(m.hp.epochs) +
                    " schedule=" + std::string(schedule) + " seed=" + std::to_string(m.hp.seed) +
                    " balance=" + (m.hp.balance_classes ? "1" : "0") + "\n";
  out += format_double(m.bias, 17) + "\n";
  out += join_doubles(std::span<const double>(m.weights.data(), d)) + "\n";
  return out;
}

void save_model(const std::filesystem::path& path, const LinearModel& m) {
  write_file(path, format_model(m));
}

LinearModel parse_model(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.size() < 3) throw DataError("model file is truncated");
  const auto header = split_whitespace(lines[0]);
  std::size_t d = 0;
  if (header.size() < 4 || header[0] != "model" || !parse_size(header[1], d) || d == 0)
    throw DataError("model header must start with 'model <d> <kind> <signal_name>'");

  LinearModel m;
  m.kind = parse_method(header[2]);
  if (m.kind == Method::kDensRay) throw DataError("densray is not a linear model kind");
  m.signal_name = std::string(header[3]);
  for (std::size_t i = 4; i < header.size(); ++i) {
    const auto kv = split(header[i], '=');
    if (kv.size() != 2) throw DataError("bad model header field '" + std::string(header[i]) + "'");
    bool ok = true;
    if (kv[0] == "C") {
      ok = parse_double(kv[1], m.hp.c);
    } else if (kv[0] == "epsilon") {
      ok = parse_double(kv[1], m.hp.epsilon);
    } else if (kv[0] == "epochs") {
      long long e = 0;
      ok = parse_int64(kv[1], e) && e > 0;
      m.hp.epochs = static_cast<int>(e);
    } else if (kv[0] == "seed") {
      std::size_t s = 0;
      ok = parse_size(kv[1], s);
      m.hp.seed = s;
    } else if (kv[0] == "balance") {
      m.hp.balance_classes = kv[1] == "1";
      ok = kv[1] == "0" || kv[1] == "1";
    } else if (kv[0] != "schedule") {
      ok = false;
    }
    if (!ok) throw DataError("bad model header field '" + std::string(header[i]) + "'");
  }
  if (!parse_double(trim(lines[1]), m.bias)) throw DataError("bad model bias line");
  const auto w = parse_doubles(lines[2]);
  if (w.size() != d) throw DataError("model weight count mismatch");
  m.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(d));
  if (!m.weights.allFinite() || !std::isfinite(m.bias)) throw DataError("model has non-finite values");
  return m;
}

LinearModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace densray
