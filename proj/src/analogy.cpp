#include "densray/analogy.hpp"

#include "densray/error.hpp"
#include "densray/seed.hpp"
#include "densray/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

namespace densray {

std::string_view group_name(AnalogyGroup g) {
  switch (g) {
    case AnalogyGroup::kInflectional: return "Inflectional";
    case AnalogyGroup::kDerivational: return "Derivational";
    case AnalogyGroup::kEncyclopedia: return "Encyclopedia";
    case AnalogyGroup::kLexicography: return "Lexicography";
    case AnalogyGroup::kGoogle: return "GA";
  }
  return "unknown";
}

std::string_view space_name(Space s) { return s == Space::kOriginal ? "original" : "complement"; }

// ---------------------------------------------------------------- parsing

std::vector<AnalogyCategory> parse_google_analogy_text(std::string_view text) {
  std::vector<AnalogyCategory> out;
  std::set<std::pair<std::string, std::string>> seen;
  const auto add = [&](std::string_view l, std::string_view r) {
    if (seen.emplace(std::string(l), std::string(r)).second)
      out.back().pairs.push_back(AnalogyPair{std::string(l), {std::string(r)}});
  };
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == ':') {
      const auto name = trim(line.substr(1));
      if (name.empty()) throw DataError("line " + std::to_string(i + 1) + ": empty category name");
      out.push_back(AnalogyCategory{std::string(name), AnalogyGroup::kGoogle, {}});
      seen.clear();
      continue;
    }
    if (out.empty())
      throw DataError("line " + std::to_string(i + 1) + ": question before the first ': category' header");
    const auto tokens = split_whitespace(line);
    if (tokens.size() != 4)
      throw DataError("line " + std::to_string(i + 1) + ": expected 4 tokens, got " +
                      std::to_string(tokens.size()));
    add(tokens[0], tokens[1]);
    add(tokens[2], tokens[3]);
  }
  for (const auto& cat : out)
    if (cat.pairs.size() < 2) throw DataError("category '" + cat.name + "' has fewer than 2 pairs");
  return out;
}

std::vector<AnalogyCategory> parse_google_analogy(const std::filesystem::path& path) {
  return parse_google_analogy_text(read_file(path));
}

AnalogyCategory parse_bats_file(std::string_view text, std::string name) {
  AnalogyCategory cat;
  switch (name.empty() ? '\0' : name.front()) {
    case 'I': cat.group = AnalogyGroup::kInflectional; break;
    case 'D': cat.group = AnalogyGroup::kDerivational; break;
    case 'E': cat.group = AnalogyGroup::kEncyclopedia; break;
    case 'L': cat.group = AnalogyGroup::kLexicography; break;
    default: throw DataError("BATS file '" + name + "' does not start with I, D, E or L");
  }
  cat.name = std::move(name);

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto where = cat.name + ":" + std::to_string(i + 1) + ": ";
    std::string_view left;
    std::string_view right;
    if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
      left = trim(line.substr(0, tab));
      right = trim(line.substr(tab + 1));
    } else {
      const auto fields = split_whitespace(line);
      if (fields.size() != 2) throw DataError(where + "expected 'left<TAB>right1/right2/...'");
      left = fields[0];
      right = fields[1];
    }
    if (left.empty() || right.empty() || has_whitespace(left))
      throw DataError(where + "expected 'left<TAB>right1/right2/...'");
    AnalogyPair pair{std::string(left), {}};
    for (const auto variant : split(right, '/')) {
      const auto v = trim(variant);
      if (!v.empty() && std::find(pair.right.begin(), pair.right.end(), v) == pair.right.end())
        pair.right.emplace_back(v);
    }
    if (pair.right.empty()) throw DataError(where + "no right-hand answers");
    cat.pairs.push_back(std::move(pair));
  }
  if (cat.pairs.empty()) throw DataError("BATS file '" + cat.name + "' is empty");
  if (cat.pairs.size() < 2) throw DataError("BATS file '" + cat.name + "' has fewer than 2 pairs");
  return cat;
}

std::vector<AnalogyCategory> parse_bats(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("BATS path is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  if (files.empty()) throw DataError("no BATS .txt files found");
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  std::vector<AnalogyCategory> out;
  for (const auto& f : files) out.push_back(parse_bats_file(read_file(f), f.stem().string()));
  return out;
}

// ---------------------------------------------------------------- protocol

LooSplit loo_protocol(const AnalogyCategory& cat, std::size_t test_index) {
  if (test_index >= cat.pairs.size()) throw UsageError("loo_protocol: test index out of range");
  LooSplit split;
  split.test = cat.pairs[test_index];
  std::unordered_set<std::string_view> test_words{split.test.left};
  for (const auto& r : split.test.right) test_words.insert(r);

  for (std::size_t j = 0; j < cat.pairs.size(); ++j) {
    if (j == test_index) continue;
    const auto& p = cat.pairs[j];
    bool clash = test_words.contains(p.left);
    for (const auto& r : p.right) clash = clash || test_words.contains(r);
    if (!clash) split.train.push_back(p);
  }
  split.skipped = split.train.size() < 2;
  return split;
}

AnalogyClasses analogy_classes(const Embeddings& emb, const std::vector<AnalogyPair>& train) {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<std::string> all;
  std::unordered_set<std::string> in_left;
  std::unordered_set<std::string> in_right;
  std::unordered_set<std::string> in_all;
  for (const auto& p : train) {
    if (emb.vocab.contains(p.left)) {
      if (in_left.insert(p.left).second) left.push_back(p.left);
      if (in_all.insert(p.left).second) all.push_back(p.left);
    }
    for (const auto& r : p.right) {
      if (!emb.vocab.contains(r)) continue;
      if (in_right.insert(r).second) right.push_back(r);
      if (in_all.insert(r).second) all.push_back(r);
    }
  }
  AnalogyClasses out;
  out.train_words = std::move(all);
  for (auto& w : left)
    if (!in_right.contains(w)) out.left.push_back(std::move(w));
  for (auto& w : right)
    if (!in_left.contains(w)) out.right.push_back(std::move(w));
  return out;
}

namespace {

BinarySignal class_signal(const AnalogyClasses& classes) {
  if (classes.left.empty() || classes.right.empty())
    throw DataError("analogy training classes must both be non-empty");
  return BinarySignal{"right-vs-left", classes.right, classes.left};
}

Hyperparams fold_hp(const AnalogyOptions& options, std::uint64_t seed) {
  Hyperparams hp = options.hp;
  hp.seed = seed;
  return hp;
}

std::vector<char> excluded_mask(const Embeddings& emb, const AnalogyClasses& classes,
                                std::string_view query, const AnalogyOptions& options) {
  std::vector<char> mask(emb.size(), 0);
  if (options.exclude_query) mask[emb.vocab.index(query)] = 1;
  if (options.exclude_train)
    for (const auto& w : classes.train_words) mask[emb.vocab.index(w)] = 1;
  return mask;
}

void require_normalized(const Embeddings& emb) {
  if (!emb.matrix.normalized()) throw UsageError("analogy scoring requires normalized embeddings");
}

}  // namespace

Vector interpretable_direction(const Embeddings& emb, const AnalogyClasses& classes, Method method,
                               std::uint64_t seed, const AnalogyOptions& options) {
  const BinarySignal sig = class_signal(classes);
  switch (method) {
    case Method::kDensRay:
      return densray(emb, sig, options.weights).q.col(0);
    case Method::kSvm: {
      const LinearModel m = train_svm(emb, sig, fold_hp(options, seed));
      const double norm = m.weights.norm();
      if (!(norm > 0.0)) throw NumericError("SVM returned zero weights");
      return m.weights / norm;
    }
    default:
      throw UsageError("IntCos supports densray and svm directions only");
  }
}

Vector intcos_scores(const Embeddings& emb, const AnalogyClasses& classes, const Vector& direction,
                     std::string_view query, Space space, const AnalogyOptions& options) {
  require_normalized(emb);
  const auto& m = emb.matrix.data();
  const auto n = static_cast<Eigen::Index>(emb.size());
  const Eigen::Index qi = static_cast<Eigen::Index>(emb.vocab.index(query));

  // Interpretable coordinate of every word; orient the right class upward.
  Vector coord = m * direction;
  double right_mean = 0.0;
  double left_mean = 0.0;
  for (const auto& w : classes.right) right_mean += coord[static_cast<Eigen::Index>(emb.vocab.index(w))];
  for (const auto& w : classes.left) left_mean += coord[static_cast<Eigen::Index>(emb.vocab.index(w))];
  right_mean /= static_cast<double>(std::max<std::size_t>(1, classes.right.size()));
  left_mean /= static_cast<double>(std::max<std::size_t>(1, classes.left.size()));
  const double sign = right_mean < left_mean ? -1.0 : 1.0;

  const double lo = (sign * coord).minCoeff();
  const double hi = (sign * coord).maxCoeff();
  // A spread at rounding level counts as a constant column.
  const bool constant = hi - lo <= 1e-12 * std::max({1.0, std::abs(hi), std::abs(lo)});
  Vector norm(n);
  for (Eigen::Index v = 0; v < n; ++v) norm[v] = constant ? 0.5 : (sign * coord[v] - lo) / (hi - lo);

  // Cosines: rows are unit, and an orthogonal rotation preserves dot products,
  // so the rotated-space cosine is the raw dot product. The complement drops
  // the direction component: <a,v> - c_a c_v over the residual norms.
  Vector sims = m * m.row(qi).transpose();
  if (space == Space::kComplement) {
    const double ca = coord[qi];
    const double ra = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    for (Eigen::Index v = 0; v < n; ++v) {
      const double rv = std::sqrt(std::max(0.0, 1.0 - coord[v] * coord[v]));
      const double denom = ra * rv;
      sims[v] = denom > 0.0 ? (sims[v] - ca * coord[v]) / denom : 0.0;
    }
  }

  const auto mask = excluded_mask(emb, classes, query, options);
  Vector scores(n);
  for (Eigen::Index v = 0; v < n; ++v)
    scores[v] = mask[static_cast<std::size_t>(v)] ? -std::numeric_limits<double>::infinity()
                                                   : norm[v] * std::clamp(sims[v], -1.0, 1.0);
  return scores;
}

Vector lrcos_scores(const Embeddings& emb, const AnalogyClasses& classes, const LinearModel& model,
                    std::string_view query, const AnalogyOptions& options) {
  require_normalized(emb);
  const auto& m = emb.matrix.data();
  const auto n = static_cast<Eigen::Index>(emb.size());
  const Eigen::Index qi = static_cast<Eigen::Index>(emb.vocab.index(query));
  const Vector sims = m * m.row(qi).transpose();
  const Vector logits = (m * model.weights).array() + model.bias;
  const auto mask = excluded_mask(emb, classes, query, options);
  Vector scores(n);
  for (Eigen::Index v = 0; v < n; ++v)
    scores[v] = mask[static_cast<std::size_t>(v)] ? -std::numeric_limits<double>::infinity()
                                                   : sigmoid(logits[v]) * std::clamp(sims[v], -1.0, 1.0);
  return scores;
}

std::string argmax_token(const Embeddings& emb, const Vector& scores) {
  Eigen::Index best = -1;
  for (Eigen::Index v = 0; v < scores.size(); ++v) {
    if (scores[v] == -std::numeric_limits<double>::infinity()) continue;
    if (best < 0 || scores[v] > scores[best]) best = v;
  }
  if (best < 0) throw DataError("no candidate words left after exclusion");
  return emb.vocab[static_cast<std::size_t>(best)];
}

std::string intcos_predict(const Embeddings& emb, const std::vector<AnalogyPair>& train,
                           std::string_view query, Method method, Space space, std::uint64_t seed,
                           const AnalogyOptions& options) {
  if (!emb.vocab.contains(query)) throw DataError("query '" + std::string(query) + "' is not in the vocabulary");
  const AnalogyClasses classes = analogy_classes(emb, train);
  const Vector q = interpretable_direction(emb, classes, method, seed, options);
  return argmax_token(emb, intcos_scores(emb, classes, q, query, space, options));
}

std::string lrcos_predict(const Embeddings& emb, const std::vector<AnalogyPair>& train,
                          std::string_view query, std::uint64_t seed, const AnalogyOptions& options) {
  if (!emb.vocab.contains(query)) throw DataError("query '" + std::string(query) + "' is not in the vocabulary");
  const AnalogyClasses classes = analogy_classes(emb, train);
  const LinearModel model = train_logreg(emb, class_signal(classes), fold_hp(options, seed));
  return argmax_token(emb, lrcos_scores(emb, classes, model, query, options));
}

// ---------------------------------------------------------------- statistics

namespace {

double mean_pairwise_cosine(const Embeddings& emb, const std::vector<std::string>& words) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      sum += cosine(emb.row(words[i]), emb.row(words[j]));
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

CosineStats cosine_stats(const AnalogyCategory& cat, const Embeddings& emb) {
  double inter = 0.0;
  std::size_t n_inter = 0;
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::unordered_set<std::string> seen_left;
  std::unordered_set<std::string> seen_right;
  for (const auto& p : cat.pairs) {
    const bool has_left = emb.vocab.contains(p.left);
    if (has_left && seen_left.insert(p.left).second) left.push_back(p.left);
    for (const auto& r : p.right)
      if (emb.vocab.contains(r) && seen_right.insert(r).second) right.push_back(r);
    if (has_left && !p.right.empty() && emb.vocab.contains(p.right.front())) {
      inter += cosine(emb.row(p.left), emb.row(p.right.front()));
      ++n_inter;
    }
  }
  CosineStats s;
  s.inter = n_inter ? inter / static_cast<double>(n_inter) : std::numeric_limits<double>::quiet_NaN();
  s.intra_left = mean_pairwise_cosine(emb, left);
  s.intra_right = mean_pairwise_cosine(emb, right);
  return s;
}

// ---------------------------------------------------------------- evaluation

std::string AnalogyColumn::name() const {
  if (lrcos) return "lrcos";
  return "intcos-" + std::string(method_name(method)) + "-" + std::string(space_name(space));
}

std::vector<AnalogyColumn> analogy_columns(const std::vector<std::string>& methods,
                                           const std::vector<std::string>& spaces) {
  std::vector<Space> parsed_spaces;
  for (const auto& s : spaces) {
    if (s == "original")
      parsed_spaces.push_back(Space::kOriginal);
    else if (s == "complement")
      parsed_spaces.push_back(Space::kComplement);
    else
      throw UsageError("unknown space '" + s + "'");
  }
  std::vector<AnalogyColumn> out;
  for (const auto& m : methods) {
    if (m == "lrcos") {
      out.push_back(AnalogyColumn{true, Method::kLogReg, Space::kOriginal});
    } else if (m == "intcos-densray" || m == "intcos-svm") {
      if (parsed_spaces.empty()) throw UsageError("IntCos needs at least one space");
      const Method method = m == "intcos-densray" ? Method::kDensRay : Method::kSvm;
      for (const auto s : parsed_spaces) out.push_back(AnalogyColumn{false, method, s});
    } else {
      throw UsageError("unknown analogy method '" + m + "'");
    }
  }
  if (out.empty()) throw UsageError("no analogy methods selected");
  return out;
}

double CategoryResult::precision(std::size_t column) const {
  if (n_evaluated == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(correct.at(column)) / static_cast<double>(n_evaluated);
}

AnalogyReport evaluate(const std::vector<AnalogyCategory>& datasets, const Embeddings& emb,
                       const std::vector<AnalogyColumn>& columns, std::uint64_t seed,
                       const AnalogyOptions& options, std::vector<FoldRecord>* folds) {
  require_normalized(emb);
  AnalogyReport report;
  report.columns = columns;

  for (std::size_t c = 0; c < datasets.size(); ++c) {
    const AnalogyCategory& raw = datasets[c];
    CategoryResult result;
    result.name = raw.name;
    result.group = raw.group;
    result.correct.assign(columns.size(), 0);
    result.stats = cosine_stats(raw, emb);

    // Restrict answers to the vocabulary; unanswerable pairs are skipped.
    AnalogyCategory cat{raw.name, raw.group, {}};
    for (const auto& p : raw.pairs) {
      AnalogyPair kept{p.left, {}};
      for (const auto& r : p.right)
        if (emb.vocab.contains(r)) kept.right.push_back(r);
      if (emb.vocab.contains(p.left) && !kept.right.empty())
        cat.pairs.push_back(std::move(kept));
      else
        ++result.n_skipped;
    }

    for (std::size_t i = 0; i < cat.pairs.size(); ++i) {
      const LooSplit split = loo_protocol(cat, i);
      const AnalogyClasses classes = analogy_classes(emb, split.train);
      if (split.skipped || classes.left.empty() || classes.right.empty()) {
        ++result.n_skipped;
        continue;
      }
      const std::uint64_t fold_seed = derive_seed(seed, {kAnalogyStream, c, i});
      const std::string& query = split.test.left;

      // Directions and models are shared between the spaces of one method.
      std::optional<Vector> densray_dir;
      std::optional<Vector> svm_dir;
      FoldRecord record{c, i, split.test, classes.train_words, {}};
      for (std::size_t k = 0; k < columns.size(); ++k) {
        const AnalogyColumn& col = columns[k];
        std::string predicted;
        if (col.lrcos) {
          const LinearModel model = train_logreg(emb, class_signal(classes), fold_hp(options, fold_seed));
          predicted = argmax_token(emb, lrcos_scores(emb, classes, model, query, options));
        } else {
          auto& dir = col.method == Method::kDensRay ? densray_dir : svm_dir;
          if (!dir) dir = interpretable_direction(emb, classes, col.method, fold_seed, options);
          predicted = argmax_token(emb, intcos_scores(emb, classes, *dir, query, col.space, options));
        }
        const auto& answers = split.test.right;
        if (std::find(answers.begin(), answers.end(), predicted) != answers.end()) ++result.correct[k];
        record.predictions.push_back(std::move(predicted));
      }
      ++result.n_evaluated;
      if (folds) folds->push_back(std::move(record));
    }
    report.categories.push_back(std::move(result));
  }
  return report;
}

AnalogySummary summarize(const AnalogyReport& report) {
  const std::size_t k = report.columns.size();
  AnalogySummary s{std::vector<double>(k), std::vector<double>(k), std::vector<double>(k)};
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t correct = 0;
    std::size_t evaluated = 0;
    std::vector<double> precisions;
    for (const auto& cat : report.categories) {
      correct += cat.correct[col];
      evaluated += cat.n_evaluated;
      if (cat.n_evaluated) precisions.push_back(cat.precision(col));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.micro[col] = evaluated ? static_cast<double>(correct) / static_cast<double>(evaluated) : nan;
    if (precisions.empty()) {
      s.macro_mean[col] = s.macro_std[col] = nan;
      continue;
    }
    double mean = 0.0;
    for (double p : precisions) mean += p;
    mean /= static_cast<double>(precisions.size());
    double var = 0.0;
    for (double p : precisions) var += (p - mean) * (p - mean);
    s.macro_mean[col] = mean;
    s.macro_std[col] = std::sqrt(var / static_cast<double>(precisions.size()));
  }
  return s;
}

namespace {

struct StatsAccumulator {
  std::vector<double> values[3];
  std::vector<double> weights;
  void add(const CosineStats& s, double w) {
    values[0].push_back(s.inter);
    values[1].push_back(s.intra_left);
    values[2].push_back(s.intra_right);
    weights.push_back(w);
  }
  // Mean over finite entries; weighted when `weighted`, else plain.
  double mean(int which, bool weighted) const {
    double sum = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double v = values[which][i];
      if (!std::isfinite(v)) continue;
      const double w = weighted ? weights[i] : 1.0;
      sum += w * v;
      total += w;
    }
    return total > 0.0 ? sum / total : std::numeric_limits<double>::quiet_NaN();
  }
  double stddev(int which) const {
    const double m = mean(which, false);
    double var = 0.0;
    std::size_t n = 0;
    for (double v : values[which]) {
      if (!std::isfinite(v)) continue;
      var += (v - m) * (v - m);
      ++n;
    }
    return n ? std::sqrt(var / static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
  }
};

std::string row(std::string_view kind, std::string_view name, std::string_view group, std::size_t evaluated,
                std::size_t skipped, const double stats[3], const std::vector<double>& precisions) {
  std::string out = std::string(kind) + "\t" + std::string(name) + "\t" + std::string(group) + "\t" +
                    std::to_string(evaluated) + "\t" + std::to_string(skipped);
  for (int i = 0; i < 3; ++i) out += "\t" + format_fixed(stats[i], 4);
  for (double p : precisions) out += "\t" + format_fixed(p, 4);
  return out + "\n";
}

}  // namespace

std::string format_analogy_report(const AnalogyReport& report) {
  std::string out = "kind\tname\tgroup\tn_evaluated\tn_skipped\tinter\tintraL\tintraR";
  for (const auto& col : report.columns) out += "\t" + col.name();
  out += "\n";

  const std::size_t k = report.columns.size();
  StatsAccumulator all;
  std::size_t total_eval = 0;
  std::size_t total_skip = 0;
  for (const auto& cat : report.categories) {
    std::vector<double> p(k);
    for (std::size_t c = 0; c < k; ++c) p[c] = cat.precision(c);
    const double stats[3] = {cat.stats.inter, cat.stats.intra_left, cat.stats.intra_right};
    out += row("category", cat.name, group_name(cat.group), cat.n_evaluated, cat.n_skipped, stats, p);
    all.add(cat.stats, static_cast<double>(cat.n_evaluated));
    total_eval += cat.n_evaluated;
    total_skip += cat.n_skipped;
  }

  for (const AnalogyGroup g : {AnalogyGroup::kDerivational, AnalogyGroup::kEncyclopedia,
                               AnalogyGroup::kInflectional, AnalogyGroup::kLexicography}) {
    AnalogyReport sub{report.columns, {}};
    for (const auto& cat : report.categories)
      if (cat.group == g) sub.categories.push_back(cat);
    if (sub.categories.empty()) continue;
    StatsAccumulator acc;
    std::size_t eval = 0;
    std::size_t skip = 0;
    for (const auto& cat : sub.categories) {
      acc.add(cat.stats, static_cast<double>(cat.n_evaluated));
      eval += cat.n_evaluated;
      skip += cat.n_skipped;
    }
    const double stats[3] = {acc.mean(0, false), acc.mean(1, false), acc.mean(2, false)};
    out += row("group", group_name(g), group_name(g), eval, skip, stats, summarize(sub).macro_mean);
  }

  const AnalogySummary s = summarize(report);
  const double micro_stats[3] = {all.mean(0, true), all.mean(1, true), all.mean(2, true)};
  const double macro_stats[3] = {all.mean(0, false), all.mean(1, false), all.mean(2, false)};
  const double std_stats[3] = {all.stddev(0), all.stddev(1), all.stddev(2)};
  out += row("summary", "micro-mean", "-", total_eval, total_skip, micro_stats, s.micro);
  out += row("summary", "macro-mean", "-", total_eval, total_skip, macro_stats, s.macro_mean);
  out += row("summary", "macro-std", "-", total_eval, total_skip, std_stats, s.macro_std);
  return out;
}

}  // namespace densray
