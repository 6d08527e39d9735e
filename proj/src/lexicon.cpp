#include "densray/lexicon.hpp"

#include "densray/error.hpp"
#include "densray/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace densray {

LexiconKind parse_lexicon_kind(std::string_view name) {
  if (name == "binary") return LexiconKind::kBinary;
  if (name == "continuous") return LexiconKind::kContinuous;
  throw UsageError("lexicon kind must be 'binary' or 'continuous'");
}

Lexicon parse_lexicon(std::string_view text, LexiconKind kind, std::string name) {
  Lexicon lex{{}, kind, std::move(name)};
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const auto where = lex.name + ":" + std::to_string(i + 1) + ": ";
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty())
      throw DataError(where + "expected 'token<TAB>score'");
    double score = 0.0;
    if (!parse_double(trim(fields[1]), score) || !std::isfinite(score))
      throw DataError(where + "non-numeric score '" + std::string(fields[1]) + "'");
    if (kind == LexiconKind::kBinary && score != 1.0 && score != -1.0 && score != 0.0)
      throw DataError(where + "binary scores must be -1, 0 or 1");
    lex.entries.emplace_back(std::string(fields[0]), score);
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, LexiconKind kind) {
  return parse_lexicon(read_file(path), kind, path.stem().string());
}

Lexicon dedup(const Lexicon& lex) {
  Lexicon out{{}, lex.kind, lex.name};
  std::unordered_set<std::string_view> seen;
  for (const auto& entry : lex.entries)
    if (seen.insert(entry.first).second) out.entries.push_back(entry);
  return out;
}

Lexicon remove_neutral(const Lexicon& lex) {
  Lexicon out{{}, lex.kind, lex.name};
  for (const auto& entry : lex.entries)
    if (entry.second != 0.0) out.entries.push_back(entry);
  if (out.empty()) throw DataError("lexicon '" + lex.name + "' is empty after removing neutral words");
  return out;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty list");
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

Lexicon binarize_median(const Lexicon& lex) {
  std::vector<double> scores;
  scores.reserve(lex.size());
  for (const auto& entry : lex.entries) scores.push_back(entry.second);
  if (scores.empty() || std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores[0]; }))
    throw DataError("lexicon '" + lex.name + "' needs at least two distinct scores to binarize");
  const double median = lower_median(scores);
  Lexicon out{{}, LexiconKind::kBinary, lex.name};
  for (const auto& [token, score] : lex.entries) {
    if (score > median)
      out.entries.emplace_back(token, 1.0);
    else if (score < median)
      out.entries.emplace_back(token, -1.0);
  }
  return out;
}

std::pair<Lexicon, Lexicon> split_disjoint(const Lexicon& train, const Lexicon& test) {
  std::unordered_set<std::string_view> test_tokens;
  for (const auto& entry : test.entries) test_tokens.insert(entry.first);
  Lexicon kept{{}, train.kind, train.name};
  for (const auto& entry : train.entries)
    if (!test_tokens.contains(entry.first)) kept.entries.push_back(entry);
  if (kept.empty()) throw DataError("train lexicon '" + train.name + "' is empty after removing test overlap");
  return {kept, test};
}

BinarySignal to_binary_signal(const Lexicon& lex) {
  BinarySignal sig;
  sig.name = lex.name.empty() ? "signal" : lex.name;
  for (const auto& [token, score] : lex.entries) {
    if (score > 0.0)
      sig.positives.push_back(token);
    else if (score < 0.0)
      sig.negatives.push_back(token);
  }
  return sig;
}

ContinuousSignal to_continuous_signal(const Lexicon& lex) {
  ContinuousSignal sig;
  sig.name = lex.name.empty() ? "signal" : lex.name;
  sig.scores = lex.entries;
  return sig;
}

namespace {

std::int64_t tied_pairs_in_runs(std::span<const std::size_t> order, auto equal) {
  std::int64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i < order.size() && equal(order[i - 1], order[i])) {
      ++run;
    } else {
      total += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts `idx` by key b (stable) and returns the number of strict inversions.
std::int64_t merge_count(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf,
                         std::span<const double> b, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(idx, buf, b, lo, mid) + merge_count(idx, buf, b, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (b[idx[j]] < b[idx[i]]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = idx[j++];
    } else {
      buf[k++] = idx[i++];
    }
  }
  while (i < mid) buf[k++] = idx[i++];
  while (j < hi) buf[k++] = idx[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            idx.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

TauCounts kendall_counts(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("kendall_tau: length mismatch");
  if (a.size() < 2) throw UsageError("kendall_tau: need at least 2 observations");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isnan(a[i]) || std::isnan(b[i])) throw DataError("kendall_tau: NaN input");

  const std::size_t n = a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });

  TauCounts c;
  c.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  c.ties_a = tied_pairs_in_runs(order, [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
  c.ties_ab = tied_pairs_in_runs(
      order, [&](std::size_t i, std::size_t j) { return a[i] == a[j] && b[i] == b[j]; });

  std::vector<std::size_t> buf(n);
  c.discordant = merge_count(order, buf, b, 0, n);
  c.ties_b = tied_pairs_in_runs(order, [&](std::size_t i, std::size_t j) { return b[i] == b[j]; });
  return c;
}

double tau_b_from_counts(const TauCounts& c) {
  const std::int64_t numerator = c.pairs - c.ties_a - c.ties_b + c.ties_ab - 2 * c.discordant;
  const std::int64_t untied_a = c.pairs - c.ties_a;
  const std::int64_t untied_b = c.pairs - c.ties_b;
  if (untied_a == 0 || untied_b == 0) throw DataError("kendall_tau: undefined for an all-tied list");
  return static_cast<double>(numerator) /
         std::sqrt(static_cast<double>(untied_a) * static_cast<double>(untied_b));
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  return tau_b_from_counts(kendall_counts(a, b));
}

namespace {

template <typename Score>
InductionResult induce_with(const Embeddings& emb, Score score, const BinarySignal& train,
                            const Lexicon& test) {
  double pos = 0.0;
  double neg = 0.0;
  std::size_t np = 0;
  std::size_t nn = 0;
  for (const auto& t : train.positives)
    if (const auto i = emb.vocab.find(t)) pos += score(*i), ++np;
  for (const auto& t : train.negatives)
    if (const auto i = emb.vocab.find(t)) neg += score(*i), ++nn;
  if (np == 0 || nn == 0) throw DataError("orientation needs train words of both classes in the vocabulary");
  const double sign = pos / static_cast<double>(np) < neg / static_cast<double>(nn) ? -1.0 : 1.0;

  InductionResult out;
  std::vector<double> gold;
  std::vector<double> predicted;
  for (const auto& [token, value] : test.entries) {
    const auto i = emb.vocab.find(token);
    if (!i) {
      ++out.skipped;
      continue;
    }
    const double p = sign * score(*i);
    out.predicted.emplace_back(token, p);
    gold.push_back(value);
    predicted.push_back(p);
  }
  out.n_test = gold.size();
  if (out.n_test == 0) throw DataError("no test token of '" + test.name + "' is in the vocabulary");
  out.tau = kendall_tau(gold, predicted);
  return out;
}

}  // namespace

InductionResult induce(const Embeddings& emb, const Rotation& rot, const BinarySignal& train,
                       const Lexicon& test) {
  if (rot.dim() != emb.dim()) throw UsageError("induce: rotation dimension mismatch");
  const Vector q = rot.q.col(0);
  const auto& m = emb.matrix.data();
  return induce_with(emb, [&](std::size_t i) { return m.row(static_cast<Eigen::Index>(i)).dot(q); },
                     train, test);
}

InductionResult induce(const Embeddings& emb, const LinearModel& model, const BinarySignal& train,
                       const Lexicon& test) {
  if (model.weights.size() != emb.dim()) throw UsageError("induce: model dimension mismatch");
  const auto& m = emb.matrix.data();
  return induce_with(
      emb,
      [&](std::size_t i) { return m.row(static_cast<Eigen::Index>(i)).dot(model.weights) + model.bias; },
      train, test);
}

PreparedLexicon prepare_lexicon(const Embeddings& emb, const Lexicon& train, const Lexicon& test) {
  if (train.kind != test.kind) throw UsageError("train and test lexicons must have the same kind");
  const bool binary = train.kind == LexiconKind::kBinary;

  Lexicon train_clean = dedup(train);
  Lexicon test_clean = dedup(test);
  if (binary) {
    train_clean = remove_neutral(train_clean);
    test_clean = remove_neutral(test_clean);
  }
  Lexicon train_bin = binary ? train_clean : binarize_median(train_clean);
  train_bin = split_disjoint(train_bin, test_clean).first;

  Lexicon in_vocab{{}, LexiconKind::kBinary, train.name};
  for (const auto& entry : train_bin.entries)
    if (emb.vocab.contains(entry.first)) in_vocab.entries.push_back(entry);
  if (in_vocab.empty()) throw DataError("no train token of '" + train.name + "' is in the vocabulary");

  std::unordered_map<std::string_view, double> original;
  for (const auto& [token, score] : train_clean.entries) original.emplace(token, score);
  Lexicon continuous{{}, LexiconKind::kContinuous, train.name};
  for (const auto& entry : in_vocab.entries)
    continuous.entries.emplace_back(entry.first, original.at(entry.first));

  return PreparedLexicon{train.name, in_vocab, continuous, test_clean};
}

InductionResult run_induction(const Embeddings& emb, const PreparedLexicon& data, Method method,
                              const InductionOptions& options) {
  const BinarySignal train = to_binary_signal(data.train_binary);
  Hyperparams hp = options.hp;
  hp.seed = options.seed;
  switch (method) {
    case Method::kDensRay:
      return induce(emb, densray(emb, train, options.weights), train, data.test);
    case Method::kSvm:
      return induce(emb, train_svm(emb, train, hp), train, data.test);
    case Method::kSvr:
      return induce(emb, train_svr(emb, to_continuous_signal(data.train_continuous), hp), train,
                    data.test);
    case Method::kLogReg:
      return induce(emb, train_logreg(emb, train, hp), train, data.test);
  }
  throw UsageError("unknown method");
}

std::string format_induction_report(const std::vector<InductionRow>& rows) {
  std::string out = "name\tmethod\tn_train\tn_test\tskipped\ttau\n";
  for (const auto& r : rows) {
    out += r.name + "\t" + r.method + "\t" + std::to_string(r.n_train) + "\t" +
           std::to_string(r.n_test) + "\t" + std::to_string(r.skipped) + "\t" +
           format_fixed(r.tau, 6) + "\n";
  }
  return out;
}

}  // namespace densray
