#include "densray/debias.hpp"

#include "densray/error.hpp"
#include "densray/symmetric_eig.hpp"
#include "densray/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace densray {

BinarySignal parse_gender_pairs(std::string_view text, std::string name) {
  BinarySignal sig;
  sig.name = std::move(name);
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
      throw DataError("pairs line " + std::to_string(i + 1) + ": expected 'male<TAB>female'");
    sig.positives.emplace_back(trim(fields[0]));
    sig.negatives.emplace_back(trim(fields[1]));
  }
  if (sig.positives.empty()) throw DataError("gender pair file is empty");
  return sig;
}

BinarySignal load_gender_pairs(const std::filesystem::path& path) {
  return parse_gender_pairs(read_file(path), path.stem().string());
}

std::vector<std::string> parse_wordlist_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw DataError("wordlist is not valid JSON");
  if (!doc.is_array()) throw DataError("wordlist must be a JSON array");
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& item : doc) {
    const nlohmann::json* head = &item;
    if (item.is_array()) {
      if (item.empty()) throw DataError("wordlist contains an empty array");
      head = &item.front();
    }
    if (!head->is_string()) throw DataError("wordlist entries must be strings or arrays led by a string");
    auto token = head->get<std::string>();
    if (seen.insert(token).second) out.push_back(std::move(token));
  }
  if (out.empty()) throw DataError("wordlist is empty");
  return out;
}

std::vector<std::string> load_wordlist_json(const std::filesystem::path& path) {
  return parse_wordlist_json(read_file(path));
}

DebiasResult debias(const Embeddings& emb, const BinarySignal& gender, Eigen::Index k_drop,
                    const WeightMode& w, bool renormalize) {
  if (k_drop < 0 || k_drop >= static_cast<Eigen::Index>(emb.dim()))
    throw UsageError("drop count must be in [0, " + std::to_string(emb.dim()) + ")");
  Rotation rot = densray(emb, gender, w);
  Embeddings rotated = project(emb, rot);
  Embeddings comp = complement(rotated, k_drop, renormalize);
  return DebiasResult{std::move(rot), std::move(rotated), std::move(comp)};
}

double signal_strength(const Embeddings& emb, const BinarySignal& signal, const WeightMode& w) {
  return eig_symmetric(build_A_binary(emb, signal, w)).values[0];
}

namespace {

// Cosine that reads a vanished complement row as orthogonal to everything.
template <typename A, typename B>
double safe_cosine(const A& u, const B& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace

BiasReport bias_report(const Embeddings& original, const Embeddings& complement,
                       const std::string& probe_a, const std::string& probe_b,
                       const std::vector<std::string>& wordlist, std::size_t k) {
  for (const auto& probe : {probe_a, probe_b})
    if (!original.vocab.contains(probe) || !complement.vocab.contains(probe))
      throw DataError("probe '" + probe + "' is not in the vocabulary");

  BiasReport report;
  report.probe_a = probe_a;
  report.probe_b = probe_b;
  std::vector<std::string> found;
  for (const auto& token : wordlist) {
    if (original.vocab.contains(token) && complement.vocab.contains(token))
      found.push_back(token);
    else
      report.missing.push_back(token);
  }
  if (found.size() < k)
    throw DataError("only " + std::to_string(found.size()) + " wordlist tokens are in the vocabulary, need " +
                    std::to_string(k));

  const std::pair<const char*, const Embeddings*> spaces[] = {{"original", &original},
                                                              {"complement", &complement}};
  for (const auto& [space, emb] : spaces) {
    const auto a = emb->row(probe_a);
    const auto b = emb->row(probe_b);
    std::vector<BiasRow> rows;
    for (const auto& token : found) {
      const auto e = emb->row(token);
      BiasRow r{token, space, safe_cosine(e, a), safe_cosine(e, b), 0.0};
      r.bias = r.sim_a - r.sim_b;
      rows.push_back(std::move(r));
    }

    std::vector<BiasRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const BiasRow& x, const BiasRow& y) { return x.bias > y.bias; });
    const auto kk = static_cast<std::ptrdiff_t>(k);
    report.slices.push_back(BiasSlice{space, "top", {sorted.begin(), sorted.begin() + kk}});
    report.slices.push_back(BiasSlice{space, "bottom", {sorted.end() - kk, sorted.end()}});
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

double mean_abs_bias(const BiasReport& report, std::string_view space) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : report.rows) {
    if (r.space != space) continue;
    sum += std::abs(r.bias);
    ++n;
  }
  if (n == 0) throw UsageError("no rows for space '" + std::string(space) + "'");
  return sum / static_cast<double>(n);
}

std::string format_bias_csv(const BiasReport& report) {
  std::string out = "token,space,sim_A,sim_B,bias\n";
  for (const auto& r : report.rows)
    out += r.token + "," + r.space + "," + format_fixed(r.sim_a, 6) + "," + format_fixed(r.sim_b, 6) + "," +
           format_fixed(r.bias, 6) + "\n";
  return out;
}

std::string format_bias_slices(const BiasReport& report) {
  std::string out = "space\tslice\trank\ttoken\tsim_A\tsim_B\tbias\n";
  for (const auto& slice : report.slices) {
    for (std::size_t i = 0; i < slice.rows.size(); ++i) {
      const auto& r = slice.rows[i];
      out += slice.space + "\t" + slice.which + "\t" + std::to_string(i + 1) + "\t" + r.token + "\t" +
             format_fixed(r.sim_a, 6) + "\t" + format_fixed(r.sim_b, 6) + "\t" + format_fixed(r.bias, 6) + "\n";
    }
  }
  return out;
}

}  // namespace densray
