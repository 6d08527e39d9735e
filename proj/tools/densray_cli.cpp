// densray: interpretable rotations of word embeddings.
//
//   densray train     --emb E --lexicon L --kind binary --method densray --out rot.txt
//   densray induce    --emb E --train a,b --test c,d --methods densray,svm,svr --out report.tsv
//   densray analogy   --emb E --dataset GA-file|BATS-dir --methods intcos-densray,lrcos --out report.tsv
//   densray debias    --emb E --pairs pairs.tsv --wordlist jobs.json --probes man,woman --out dir/
//   densray stability --emb E --train a --test b --sizes 128,512 --samples 40 --out report.tsv
//
// Every subcommand accepts --config FILE with flat `key = value` lines; a key
// stands for the flag of the same name and loses to the command line.

#include "densray/analogy.hpp"
#include "densray/debias.hpp"
#include "densray/densray.hpp"
#include "densray/error.hpp"
#include "densray/lexicon.hpp"
#include "densray/linear_models.hpp"
#include "densray/seed.hpp"
#include "densray/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace densray;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// ---------------------------------------------------------------- config

// Expands `--config FILE` into `--key=value` arguments for keys not already
// given on the command line. Arguments before the subcommand are kept as is.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> config;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (!config) return kept;

  const auto given = [&](std::string_view key) {
    const std::string flag = "--" + std::string(key);
    return std::any_of(kept.begin(), kept.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
  };
  const std::string text = read_file(*config);
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw UsageError("config line " + std::to_string(i + 1) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw UsageError("config line " + std::to_string(i + 1) + ": invalid key");
    if (!given(key)) kept.push_back("--" + std::string(key) + "=" + std::string(value));
  }
  return kept;
}

// ---------------------------------------------------------------- shared options

struct Common {
  std::string emb;
  std::optional<std::size_t> max_vocab;
  bool lowercase = false;
  std::uint64_t seed = 0;
  std::string weights = "fixed:0.5,0.5";
  std::string out;
  Hyperparams hp;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--emb", c.emb, "word2vec text embeddings")->required();
  cmd->add_option("--max-vocab", c.max_vocab, "keep only the first N rows");
  cmd->add_flag("--lowercase", c.lowercase, "lowercase tokens; later collisions are dropped");
  cmd->add_option("--seed", c.seed, "global seed")->capture_default_str();
  cmd->add_option("--weights", c.weights, "DensRay pair weights: averaged | fixed:a,b")->capture_default_str();
  cmd->add_option("--c", c.hp.c, "linear models: data term weight")->capture_default_str();
  cmd->add_option("--epsilon", c.hp.epsilon, "SVR insensitivity")->capture_default_str();
  cmd->add_option("--epochs", c.hp.epochs, "linear models: passes or iterations")->capture_default_str();
}

Embeddings load_embeddings(const Common& c) {
  LoadOptions options;
  options.max_rows = c.max_vocab;
  options.lowercase = c.lowercase;
  return normalize_rows(load_word2vec_text(c.emb, options));
}

void emit(const std::string& out, const std::string& body) {
  if (out.empty() || out == "-")
    std::cout << body;
  else
    write_file(out, body);
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  if (names.empty()) throw UsageError("no methods selected");
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

LexiconKind lexicon_kind(const std::string& name) { return parse_lexicon_kind(name); }

// ---------------------------------------------------------------- train

struct TrainArgs {
  Common common;
  std::string lexicon;
  std::string kind = "binary";
  std::string method = "densray";
  std::string model_out;
};

void cmd_train(const TrainArgs& a) {
  const Method method = parse_method(a.method);
  const WeightMode weights = WeightMode::parse(a.common.weights);
  if (a.common.out.empty()) throw UsageError("--out is required");
  const Embeddings emb = load_embeddings(a.common);
  Lexicon lex = dedup(load_lexicon(a.lexicon, lexicon_kind(a.kind)));
  const bool binary = lex.kind == LexiconKind::kBinary;
  if (binary) lex = remove_neutral(lex);

  Lexicon in_vocab{{}, lex.kind, lex.name};
  for (const auto& e : lex.entries)
    if (emb.vocab.contains(e.first)) in_vocab.entries.push_back(e);
  if (in_vocab.empty()) throw DataError("no lexicon token is in the vocabulary");

  Hyperparams hp = a.common.hp;
  hp.seed = derive_seed(a.common.seed, {kTrainerStream});
  Rotation rot;
  if (method == Method::kDensRay) {
    rot = binary ? densray::densray(emb, to_binary_signal(in_vocab), weights)
                 : densray::densray(emb, to_continuous_signal(in_vocab), weights);
  } else {
    LinearModel model;
    if (method == Method::kSvr)
      model = train_svr(emb, to_continuous_signal(in_vocab), hp);
    else {
      const BinarySignal sig = to_binary_signal(binary ? in_vocab : binarize_median(in_vocab));
      model = method == Method::kSvm ? train_svm(emb, sig, hp) : train_logreg(emb, sig, hp);
    }
    if (!a.model_out.empty()) save_model(a.model_out, model);
    rot = model_to_rotation(model, a.common.seed);
  }
  save_rotation(a.common.out, rot);
}

// ---------------------------------------------------------------- induce

struct InduceArgs {
  Common common;
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::string kind = "binary";
  std::vector<std::string> methods{"densray", "svm", "svr"};
};

std::vector<PreparedLexicon> prepare_all(const Embeddings& emb, const std::vector<std::string>& train,
                                         const std::vector<std::string>& test, LexiconKind kind) {
  if (train.empty() || train.size() != test.size())
    throw UsageError("--train and --test need the same, non-zero number of lexicons");
  std::vector<PreparedLexicon> out;
  for (std::size_t i = 0; i < train.size(); ++i)
    out.push_back(prepare_lexicon(emb, load_lexicon(train[i], kind), load_lexicon(test[i], kind)));
  return out;
}

InductionOptions induction_options(const Common& c) {
  return InductionOptions{WeightMode::parse(c.weights), c.hp, derive_seed(c.seed, {kTrainerStream})};
}

void cmd_induce(const InduceArgs& a) {
  const auto methods = parse_methods(a.methods);
  const InductionOptions options = induction_options(a.common);
  const Embeddings emb = load_embeddings(a.common);
  const auto data = prepare_all(emb, a.train, a.test, lexicon_kind(a.kind));

  std::vector<InductionRow> rows;
  for (const auto& lex : data) {
    for (const Method m : methods) {
      const InductionResult r = run_induction(emb, lex, m, options);
      rows.push_back(InductionRow{lex.name, std::string(method_name(m)), lex.train_binary.size(), r.n_test,
                                  r.skipped, r.tau});
    }
  }
  for (const Method m : methods) {
    InductionRow mean{"macro-mean", std::string(method_name(m)), 0, 0, 0, 0.0};
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.method != mean.method) continue;
      mean.n_train += r.n_train;
      mean.n_test += r.n_test;
      mean.skipped += r.skipped;
      mean.tau += r.tau;
      ++count;
    }
    mean.tau /= static_cast<double>(count);
    rows.push_back(mean);
  }
  emit(a.common.out, format_induction_report(rows));
}

// ---------------------------------------------------------------- stability

struct StabilityArgs {
  InduceArgs induce;
  std::vector<std::size_t> sizes{128, 512, 2048};
  std::size_t samples = 40;
};

PreparedLexicon subsample(const PreparedLexicon& data, std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> idx(data.train_binary.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(size);
  std::sort(idx.begin(), idx.end());

  PreparedLexicon out{data.name, {{}, data.train_binary.kind, data.name},
                      {{}, data.train_continuous.kind, data.name}, data.test};
  std::unordered_map<std::string_view, double> continuous(data.train_continuous.entries.begin(),
                                                          data.train_continuous.entries.end());
  for (const std::size_t i : idx) {
    const auto& entry = data.train_binary.entries[i];
    out.train_binary.entries.push_back(entry);
    out.train_continuous.entries.emplace_back(entry.first, continuous.at(entry.first));
  }
  return out;
}

void cmd_stability(const StabilityArgs& a) {
  const auto methods = parse_methods(a.induce.methods);
  if (a.induce.train.size() != 1 || a.induce.test.size() != 1)
    throw UsageError("stability takes exactly one --train and one --test lexicon");
  if (a.sizes.empty() || a.samples == 0) throw UsageError("need at least one size and one sample");
  const InductionOptions base = induction_options(a.induce.common);
  const Embeddings emb = load_embeddings(a.induce.common);
  const auto data = prepare_all(emb, a.induce.train, a.induce.test, lexicon_kind(a.induce.kind)).front();
  for (const std::size_t size : a.sizes)
    if (size < 2 || size > data.train_binary.size())
      throw UsageError("subsample size " + std::to_string(size) + " outside [2, " +
                       std::to_string(data.train_binary.size()) + "]");

  std::string out = "size\tmethod\tmean_tau\tstd_tau\tn_samples\n";
  for (const std::size_t size : a.sizes) {
    std::vector<std::vector<double>> taus(methods.size());
    for (std::size_t s = 0; s < a.samples; ++s) {
      const PreparedLexicon sample =
          subsample(data, size, derive_seed(a.induce.common.seed, {kSubsampleStream, size, s}));
      InductionOptions options = base;
      options.seed = derive_seed(a.induce.common.seed, {kTrainerStream, size, s});
      for (std::size_t m = 0; m < methods.size(); ++m)
        taus[m].push_back(run_induction(emb, sample, methods[m], options).tau);
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const auto& t = taus[m];
      const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
      double var = 0.0;
      for (const double v : t) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(t.size()));
      out += std::to_string(size) + "\t" + std::string(method_name(methods[m])) + "\t" + format_fixed(mean, 6) +
             "\t" + format_fixed(sd, 6) + "\t" + std::to_string(t.size()) + "\n";
    }
  }
  emit(a.induce.common.out, out);
}

// ---------------------------------------------------------------- analogy

struct AnalogyArgs {
  Common common;
  std::string dataset;
  std::vector<std::string> methods{"intcos-densray", "intcos-svm", "lrcos"};
  std::vector<std::string> spaces{"original", "complement"};
  bool exclude_train = true;
};

void cmd_analogy(const AnalogyArgs& a) {
  const auto columns = analogy_columns(a.methods, a.spaces);
  AnalogyOptions options;
  options.weights = WeightMode::parse(a.common.weights);
  options.hp = a.common.hp;
  options.exclude_train = a.exclude_train;
  if (!fs::exists(a.dataset)) throw DataError("analogy dataset not found");
  const auto datasets = fs::is_directory(a.dataset) ? parse_bats(a.dataset) : parse_google_analogy(a.dataset);
  const Embeddings emb = load_embeddings(a.common);
  const AnalogyReport report = evaluate(datasets, emb, columns, a.common.seed, options);
  emit(a.common.out, format_analogy_report(report));
}

// ---------------------------------------------------------------- debias

struct DebiasArgs {
  Common common;
  std::string pairs;
  std::string wordlist;
  std::vector<std::string> probes{"man", "woman"};
  long drop = 1;
  std::size_t k = 5;
  bool renormalize = false;
};

void cmd_debias(const DebiasArgs& a) {
  if (a.probes.size() != 2) throw UsageError("--probes takes exactly two words");
  if (a.drop < 0) throw UsageError("--drop must be non-negative");
  if (a.common.out.empty()) throw UsageError("--out directory is required");
  const WeightMode weights = WeightMode::parse(a.common.weights);
  const BinarySignal gender = load_gender_pairs(a.pairs);
  const auto words = load_wordlist_json(a.wordlist);
  const Embeddings emb = load_embeddings(a.common);
  if (a.drop >= static_cast<long>(emb.dim()))
    throw UsageError("--drop must be below the embedding dimension " + std::to_string(emb.dim()));

  const DebiasResult result = debias(emb, gender, a.drop, weights, a.renormalize);
  const BiasReport report = bias_report(emb, result.complement, a.probes[0], a.probes[1], words, a.k);

  std::string summary = "space\tmean_abs_bias\tsignal_strength\n";
  for (const auto& [space, e] : {std::pair<std::string, const Embeddings*>{"original", &emb},
                                 std::pair<std::string, const Embeddings*>{"complement", &result.complement}}) {
    summary += space + "\t" + format_fixed(mean_abs_bias(report, space), 6) + "\t" +
               format_fixed(signal_strength(*e, gender, weights), 6) + "\n";
  }

  const fs::path dir(a.common.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory");
  write_file(dir / "bias.csv", format_bias_csv(report));
  write_file(dir / "bias_top.tsv", format_bias_slices(report));
  write_file(dir / "summary.tsv", summary);
  save_rotation(dir / "rotation.txt", result.rotation);
  if (!report.missing.empty()) {
    std::string missing;
    for (const auto& t : report.missing) missing += t + "\n";
    write_file(dir / "missing.txt", missing);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Interpretable orthogonal rotations of word embeddings"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "fit a rotation on one lexicon");
  add_common(c_train, train.common);
  c_train->add_option("--lexicon", train.lexicon, "token<TAB>score file")->required();
  c_train->add_option("--kind", train.kind, "binary | continuous")->capture_default_str();
  c_train->add_option("--method", train.method, "densray | svm | svr | logreg")->capture_default_str();
  c_train->add_option("--out", train.common.out, "rotation file")->required();
  c_train->add_option("--model-out", train.model_out, "also save the raw linear model");

  InduceArgs induce;
  auto* c_induce = app.add_subcommand("induce", "lexicon induction report");
  const auto add_induce = [](CLI::App* cmd, InduceArgs& a) {
    add_common(cmd, a.common);
    cmd->add_option("--train", a.train, "train lexicons")->delimiter(',')->required();
    cmd->add_option("--test", a.test, "test lexicons, aligned with --train")->delimiter(',')->required();
    cmd->add_option("--kind", a.kind, "binary | continuous")->capture_default_str();
    cmd->add_option("--methods", a.methods, "densray,svm,svr,logreg")->delimiter(',')->capture_default_str();
    cmd->add_option("--out", a.common.out, "report file (default stdout)");
  };
  add_induce(c_induce, induce);

  StabilityArgs stability;
  auto* c_stability = app.add_subcommand("stability", "induction over seeded train subsamples");
  add_induce(c_stability, stability.induce);
  c_stability->add_option("--sizes", stability.sizes, "subsample sizes")->delimiter(',')->capture_default_str();
  c_stability->add_option("--samples", stability.samples, "subsamples per size")->capture_default_str();

  AnalogyArgs analogy;
  auto* c_analogy = app.add_subcommand("analogy", "set-based analogy evaluation");
  add_common(c_analogy, analogy.common);
  c_analogy->add_option("--dataset", analogy.dataset, "Google Analogy file or BATS directory")->required();
  c_analogy->add_option("--methods", analogy.methods, "intcos-densray,intcos-svm,lrcos")
      ->delimiter(',')
      ->capture_default_str();
  c_analogy->add_option("--space", analogy.spaces, "original,complement")->delimiter(',')->capture_default_str();
  c_analogy->add_flag("--exclude-train-words", analogy.exclude_train, "drop train words from candidates")
      ->capture_default_str();
  c_analogy->add_option("--out", analogy.common.out, "report file (default stdout)");

  DebiasArgs debias_args;
  auto* c_debias = app.add_subcommand("debias", "remove a gender direction and report bias");
  add_common(c_debias, debias_args.common);
  c_debias->add_option("--pairs", debias_args.pairs, "male<TAB>female pairs")->required();
  c_debias->add_option("--wordlist", debias_args.wordlist, "JSON word list")->required();
  c_debias->add_option("--probes", debias_args.probes, "probe words A,B")->delimiter(',')->capture_default_str();
  c_debias->add_option("--drop", debias_args.drop, "leading dimensions to remove")->capture_default_str();
  c_debias->add_option("--k", debias_args.k, "rows per top/bottom slice")->capture_default_str();
  c_debias->add_flag("--renormalize", debias_args.renormalize, "renormalize complement rows");
  c_debias->add_option("--out", debias_args.common.out, "output directory")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (c_train->parsed()) cmd_train(train);
  if (c_induce->parsed()) cmd_induce(induce);
  if (c_stability->parsed()) cmd_stability(stability);
  if (c_analogy->parsed()) cmd_analogy(analogy);
  if (c_debias->parsed()) cmd_debias(debias_args);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}
