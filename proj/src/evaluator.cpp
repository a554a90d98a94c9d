#include "alinet/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "alinet/errors.hpp"
#include "alinet/numerics.hpp"

namespace alinet {

std::string similarity_name(Similarity s) {
  switch (s) {
    case Similarity::euclidean: return "euclidean";
    case Similarity::cosine: return "cosine";
    case Similarity::csls: return "csls";
  }
  return "?";
}

Similarity similarity_from_name(const std::string& name) {
  if (name == "euclidean") return Similarity::euclidean;
  if (name == "cosine") return Similarity::cosine;
  if (name == "csls") return Similarity::csls;
  throw ConfigError("unknown similarity '" + name + "'");
}

void EvalConfig::validate() const {
  if (csls_k < 1) throw ConfigError("eval: csls_k must be >= 1");
  if (hits_ks.empty()) throw ConfigError("eval: hits_ks must be nonempty");
  for (int k : hits_ks) {
    if (k < 1) throw ConfigError("eval: hits cutoffs must be >= 1");
  }
  if (tile_rows < 1) throw ConfigError("eval: tile_rows must be >= 1");
}

double EvalReport::hits_at(int k) const {
  auto it = hits.find(k);
  if (it == hits.end()) throw EvalError("Hits@" + std::to_string(k) + " not computed");
  return it->second;
}

namespace {

Matrix gather_rows(const Matrix& h, const std::vector<int>& ids, const char* what) {
  Matrix out(static_cast<int>(ids.size()), h.cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= h.rows) {
      throw EvalError(std::string(what) + ": entity id " + std::to_string(ids[i]) +
                      " outside representation matrix");
    }
    const double* src = h.row(ids[i]);
    std::copy(src, src + h.cols, out.row(static_cast<int>(i)));
  }
  return out;
}

// Rows scaled to unit norm; zero rows stay zero so their cosine is 0.
Matrix unit_rows(const Matrix& m) { return l2_normalize_rows(m); }

// Mean of the k largest values (k <= values.size()).
double mean_top_k(std::vector<double> values, int k) {
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end(),
                   std::greater<double>());
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += values[i];
  return s / k;
}

// Fixed-capacity min-heap keeping the k largest values seen.
struct TopK {
  int capacity;
  std::vector<double> heap;

  void push(double v) {
    if (static_cast<int>(heap.size()) < capacity) {
      heap.push_back(v);
      std::push_heap(heap.begin(), heap.end(), std::greater<double>());
    } else if (v > heap.front()) {
      std::pop_heap(heap.begin(), heap.end(), std::greater<double>());
      heap.back() = v;
      std::push_heap(heap.begin(), heap.end(), std::greater<double>());
    }
  }
  double mean() const {
    double s = 0.0;
    for (double v : heap) s += v;
    return heap.empty() ? 0.0 : s / static_cast<double>(heap.size());
  }
};

}  // namespace

Ranking predict_alignment(const Matrix& h, const std::vector<int>& source_ids,
                          const std::vector<int>& target_ids, const EvalConfig& cfg) {
  cfg.validate();
  if (target_ids.empty()) throw ConfigError("predict_alignment: empty target set");
  if (source_ids.empty()) throw ConfigError("predict_alignment: empty source set");

  const int n_src = static_cast<int>(source_ids.size());
  const int n_tgt = static_cast<int>(target_ids.size());
  Matrix src = gather_rows(h, source_ids, "predict_alignment");
  Matrix tgt = gather_rows(h, target_ids, "predict_alignment");

  Ranking out;
  out.sources = source_ids;
  out.targets = target_ids;
  out.ranked.resize(n_src);

  Matrix src_unit, tgt_unit;
  std::vector<double> r_src, r_tgt;
  if (cfg.similarity != Similarity::euclidean) {
    src_unit = unit_rows(src);
    tgt_unit = unit_rows(tgt);
  }
  if (cfg.similarity == Similarity::csls) {
    // Hub penalties: mean cosine to the k nearest cross-side neighbors,
    // accumulated tile by tile so no full similarity matrix is kept.
    const int k_tgt = std::min(cfg.csls_k, n_tgt);
    const int k_src = std::min(cfg.csls_k, n_src);
    r_src.assign(n_src, 0.0);
    std::vector<TopK> tgt_top(n_tgt);
    for (auto& t : tgt_top) t.capacity = k_src;
    std::vector<double> row(n_tgt);
    for (int i = 0; i < n_src; ++i) {
      const double* si = src_unit.row(i);
      for (int j = 0; j < n_tgt; ++j) {
        const double* tj = tgt_unit.row(j);
        double c = 0.0;
        for (int d = 0; d < src_unit.cols; ++d) c += si[d] * tj[d];
        row[j] = c;
        tgt_top[j].push(c);
      }
      r_src[i] = mean_top_k(row, k_tgt);
    }
    r_tgt.resize(n_tgt);
    for (int j = 0; j < n_tgt; ++j) r_tgt[j] = tgt_top[j].mean();
  }

  std::vector<double> scores(n_tgt);
  std::vector<int> order(n_tgt);
  const int tile = std::max(1, cfg.tile_rows);
  for (int start = 0; start < n_src; start += tile) {
    const int stop = std::min(n_src, start + tile);
    for (int i = start; i < stop; ++i) {
      switch (cfg.similarity) {
        case Similarity::euclidean: {
          const double* si = src.row(i);
          for (int j = 0; j < n_tgt; ++j) {
            const double* tj = tgt.row(j);
            double d2 = 0.0;
            for (int d = 0; d < src.cols; ++d) {
              const double diff = si[d] - tj[d];
              d2 += diff * diff;
            }
            scores[j] = -d2;
          }
          break;
        }
        case Similarity::cosine:
        case Similarity::csls: {
          const double* si = src_unit.row(i);
          for (int j = 0; j < n_tgt; ++j) {
            const double* tj = tgt_unit.row(j);
            double c = 0.0;
            for (int d = 0; d < src_unit.cols; ++d) c += si[d] * tj[d];
            scores[j] = cfg.similarity == Similarity::csls
                            ? 2.0 * c - r_tgt[j] - r_src[i]
                            : c;
          }
          break;
        }
      }
      for (int j = 0; j < n_tgt; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return target_ids[a] < target_ids[b];
      });
      auto& list = out.ranked[i];
      list.resize(n_tgt);
      for (int j = 0; j < n_tgt; ++j) list[j] = target_ids[order[j]];
    }
  }
  return out;
}

EvalReport compute_metrics(const Ranking& ranking, const AlignmentSet& test,
                           const std::vector<int>& hits_ks) {
  if (hits_ks.empty()) throw ConfigError("compute_metrics: no hits cutoffs");
  std::unordered_map<int, int> source_index;
  for (std::size_t i = 0; i < ranking.sources.size(); ++i) {
    source_index.emplace(ranking.sources[i], static_cast<int>(i));
  }

  EvalReport report;
  report.num_test_pairs = static_cast<int>(test.size());
  std::map<int, int> hit_counts;
  for (int k : hits_ks) hit_counts[k] = 0;
  double mrr_sum = 0.0;

  for (const auto& [s, t] : test.pairs) {
    auto it = source_index.find(s);
    if (it == source_index.end()) {
      throw EvalError("compute_metrics: source " + std::to_string(s) +
                      " has no ranked list");
    }
    const auto& list = ranking.ranked[it->second];
    auto pos = std::find(list.begin(), list.end(), t);
    if (pos == list.end()) {
      throw EvalError("compute_metrics: counterpart " + std::to_string(t) +
                      " missing from candidates of " + std::to_string(s));
    }
    const int rank = static_cast<int>(pos - list.begin()) + 1;
    mrr_sum += 1.0 / rank;
    for (auto& [k, count] : hit_counts) {
      if (rank <= k) count += 1;
    }
  }
  const double n = std::max<std::size_t>(test.size(), 1);
  for (const auto& [k, count] : hit_counts) report.hits[k] = count / n;
  report.mrr = mrr_sum / n;
  return report;
}

double overlap_coefficient(int e1, int e2, const NeighborStructure& structure,
                           const AlignmentSet& reference) {
  std::unordered_map<int, int> to2;
  bool is_reference_pair = false;
  for (const auto& [a, b] : reference.pairs) {
    to2.emplace(a, b);
    if (a == e1 && b == e2) is_reference_pair = true;
  }
  if (!is_reference_pair) {
    throw ReferentialError("overlap_coefficient: (" + std::to_string(e1) + "," +
                           std::to_string(e2) + ") is not a reference pair");
  }
  const auto& n1 = structure.one_hop()[e1];
  const auto& n2 = structure.one_hop()[e2];
  if (n1.empty() || n2.empty()) return 0.0;

  std::vector<int> mapped;
  for (int x : n1) {
    auto it = to2.find(x);
    if (it != to2.end()) mapped.push_back(it->second);
  }
  if (mapped.empty()) return 0.0;
  std::sort(mapped.begin(), mapped.end());

  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < mapped.size() && j < n2.size()) {
    if (mapped[i] == n2[j]) {
      ++common;
      ++i;
      ++j;
    } else if (mapped[i] < n2[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) /
         static_cast<double>(std::min(mapped.size(), n2.size()));
}

double mean_overlap_of_correct(const Ranking& ranking, const AlignmentSet& test,
                               const NeighborStructure& structure,
                               const AlignmentSet& reference) {
  std::unordered_map<int, int> source_index;
  for (std::size_t i = 0; i < ranking.sources.size(); ++i) {
    source_index.emplace(ranking.sources[i], static_cast<int>(i));
  }
  double sum = 0.0;
  int correct = 0;
  for (const auto& [s, t] : test.pairs) {
    auto it = source_index.find(s);
    if (it == source_index.end()) continue;
    const auto& list = ranking.ranked[it->second];
    if (list.empty() || list.front() != t) continue;
    sum += overlap_coefficient(s, t, structure, reference);
    correct += 1;
  }
  return correct == 0 ? 0.0 : sum / correct;
}

EvalReport evaluate(const Matrix& h, const AlignmentSet& test, const EvalConfig& cfg,
                    const NeighborStructure* structure,
                    const AlignmentSet* reference) {
  if (test.empty()) throw ConfigError("evaluate: empty test alignment");
  std::vector<int> sources, targets;
  sources.reserve(test.size());
  targets.reserve(test.size());
  for (const auto& [s, t] : test.pairs) {
    sources.push_back(s);
    targets.push_back(t);
  }
  Ranking ranking = predict_alignment(h, sources, targets, cfg);
  EvalReport report = compute_metrics(ranking, test, cfg.hits_ks);
  if (structure && reference) {
    report.mean_overlap_coefficient =
        mean_overlap_of_correct(ranking, test, *structure, *reference);
  }
  return report;
}

std::vector<std::pair<std::string, EvalReport>> evaluate_layers(
    const ForwardTrace& trace, const Matrix& input_features, const AlignmentSet& test,
    const EvalConfig& cfg) {
  std::vector<std::pair<std::string, EvalReport>> reports;
  reports.emplace_back("input", evaluate(input_features, test, cfg));
  for (std::size_t l = 0; l < trace.layers.size(); ++l) {
    reports.emplace_back("layer" + std::to_string(l + 1),
                         evaluate(trace.layers[l].normalized, test, cfg));
  }
  reports.emplace_back("combined", evaluate(trace.final, test, cfg));
  return reports;
}

}  // namespace alinet
