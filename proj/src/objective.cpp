#include "alinet/objective.hpp"

#include <cmath>
#include <unordered_set>

#include "alinet/errors.hpp"

namespace alinet {

void LossConfig::validate() const {
  if (margin <= 0.0) throw ConfigError("loss: margin must be > 0");
  if (alpha1 < 0.0 || alpha2 < 0.0) throw ConfigError("loss: weights must be >= 0");
  if (negatives_per_pair < 0) throw ConfigError("loss: negatives_per_pair must be >= 0");
}

RelationIndex build_relation_index(const KnowledgeGraphPair& pair) {
  std::vector<std::vector<std::pair<int, int>>> by_relation(pair.num_relations);
  for (const Triple& t : pair.triples) {
    if (pair.augment_relation && t.relation == *pair.augment_relation) continue;
    by_relation[t.relation].emplace_back(t.head, t.tail);
  }
  RelationIndex index;
  for (int r = 0; r < pair.num_relations; ++r) {
    if (by_relation[r].empty()) continue;
    index.relations.push_back(r);
    index.pairs.push_back(std::move(by_relation[r]));
  }
  return index;
}

namespace {

inline std::uint64_t pack_pair(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

NegativeSet sample_negatives(const AlignmentSet& positives,
                             const KnowledgeGraphPair& pair, int count, Rng& rng,
                             int epoch) {
  if (count < 0) throw ConfigError("sample_negatives: count must be >= 0");
  std::unordered_set<std::uint64_t> positive_keys;
  positive_keys.reserve(positives.size() * 2);
  for (const auto& [i, j] : positives.pairs) positive_keys.insert(pack_pair(i, j));

  const int n1 = pair.num_entities1;
  const int n2 = pair.num_entities2();
  NegativeSet negs;
  negs.epoch = epoch;
  negs.pairs.reserve(positives.size() * static_cast<std::size_t>(count));
  for (const auto& [i, j] : positives.pairs) {
    for (int c = 0; c < count; ++c) {
      bool placed = false;
      for (int tries = 0; tries < 1000; ++tries) {
        int ci = i, cj = j;
        if (rng.coin()) {
          ci = static_cast<int>(rng.below(n1));
        } else {
          cj = n1 + static_cast<int>(rng.below(n2));
        }
        if (positive_keys.count(pack_pair(ci, cj))) continue;
        negs.pairs.emplace_back(ci, cj);
        placed = true;
        break;
      }
      if (!placed) {
        throw SamplingError("sample_negatives: cannot corrupt pair (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return negs;
}

namespace {

void check_row(const Matrix& h, int id, const char* what) {
  if (id < 0 || id >= h.rows) {
    throw ShapeError(std::string(what) + ": entity id " + std::to_string(id) +
                     " outside representation matrix");
  }
}

// ||h_a - h_b|| and, when nonzero, the unit difference vector into `unit`.
double pair_distance(const Matrix& h, int a, int b, std::vector<double>& unit) {
  const double* ra = h.row(a);
  const double* rb = h.row(b);
  double s = 0.0;
  for (int d = 0; d < h.cols; ++d) {
    unit[d] = ra[d] - rb[d];
    s += unit[d] * unit[d];
  }
  const double n = std::sqrt(s);
  if (n > 0.0) {
    for (int d = 0; d < h.cols; ++d) unit[d] /= n;
  } else {
    std::fill(unit.begin(), unit.end(), 0.0);
  }
  return n;
}

}  // namespace

std::pair<double, Matrix> alignment_loss(const Matrix& h, const AlignmentSet& positives,
                                         const NegativeSet& negatives,
                                         const LossConfig& cfg) {
  cfg.validate();
  Matrix grad(h.rows, h.cols);
  std::vector<double> unit(h.cols);
  double loss = 0.0;

  for (const auto& [i, j] : positives.pairs) {
    check_row(h, i, "alignment_loss");
    check_row(h, j, "alignment_loss");
    const double dist = pair_distance(h, i, j, unit);
    loss += dist;
    double* gi = grad.row(i);
    double* gj = grad.row(j);
    for (int d = 0; d < h.cols; ++d) {
      gi[d] += unit[d];
      gj[d] -= unit[d];
    }
  }

  for (const auto& [i, j] : negatives.pairs) {
    check_row(h, i, "alignment_loss");
    check_row(h, j, "alignment_loss");
    const double dist = pair_distance(h, i, j, unit);
    if (dist >= cfg.margin) continue;  // hinge kink takes the zero branch
    loss += cfg.alpha1 * (cfg.margin - dist);
    double* gi = grad.row(i);
    double* gj = grad.row(j);
    for (int d = 0; d < h.cols; ++d) {
      gi[d] -= cfg.alpha1 * unit[d];
      gj[d] += cfg.alpha1 * unit[d];
    }
  }
  return {loss, std::move(grad)};
}

Matrix relation_representation(const Matrix& h, const RelationIndex& index) {
  Matrix reps(static_cast<int>(index.num_relations()), h.cols);
  for (std::size_t r = 0; r < index.num_relations(); ++r) {
    const auto& pairs = index.pairs[r];
    double* row = reps.row(static_cast<int>(r));
    for (const auto& [s, o] : pairs) {
      check_row(h, s, "relation_representation");
      check_row(h, o, "relation_representation");
      const double* hs = h.row(s);
      const double* ho = h.row(o);
      for (int d = 0; d < h.cols; ++d) row[d] += hs[d] - ho[d];
    }
    const double inv = 1.0 / static_cast<double>(pairs.size());
    for (int d = 0; d < h.cols; ++d) row[d] *= inv;
  }
  return reps;
}

std::pair<double, Matrix> relation_loss(const Matrix& h, const RelationIndex& index) {
  Matrix grad(h.rows, h.cols);
  double loss = 0.0;
  const Matrix reps = relation_representation(h, index);
  std::vector<double> u(h.cols);
  std::vector<double> unit_sum(h.cols);

  for (std::size_t r = 0; r < index.num_relations(); ++r) {
    const auto& pairs = index.pairs[r];
    const double* rep = reps.row(static_cast<int>(r));
    const double inv = 1.0 / static_cast<double>(pairs.size());
    std::fill(unit_sum.begin(), unit_sum.end(), 0.0);

    for (const auto& [s, o] : pairs) {
      const double* hs = h.row(s);
      const double* ho = h.row(o);
      double sq = 0.0;
      for (int d = 0; d < h.cols; ++d) {
        u[d] = hs[d] - ho[d] - rep[d];
        sq += u[d] * u[d];
      }
      const double dist = std::sqrt(sq);
      loss += inv * dist;
      if (dist == 0.0) continue;  // subgradient 0 at the cone tip
      double* gs = grad.row(s);
      double* go = grad.row(o);
      for (int d = 0; d < h.cols; ++d) {
        const double ud = u[d] / dist;
        gs[d] += inv * ud;
        go[d] -= inv * ud;
        unit_sum[d] += ud;
      }
    }
    // r depends on every pair of the relation: dL/dr = -(1/|T_r|) * unit_sum,
    // and dr/dh spreads it back with weight 1/|T_r| per occurrence.
    const double back = inv * inv;
    for (const auto& [s, o] : pairs) {
      double* gs = grad.row(s);
      double* go = grad.row(o);
      for (int d = 0; d < h.cols; ++d) {
        gs[d] -= back * unit_sum[d];
        go[d] += back * unit_sum[d];
      }
    }
  }
  return {loss, std::move(grad)};
}

LossResult total_loss(const Matrix& h, const AlignmentSet& positives,
                      const NegativeSet& negatives, const RelationIndex& index,
                      const LossConfig& cfg) {
  LossResult result;
  auto [l1, g1] = alignment_loss(h, positives, negatives, cfg);
  result.alignment = l1;
  result.grad = std::move(g1);
  if (cfg.alpha2 > 0.0 && index.num_relations() > 0) {
    auto [l2, g2] = relation_loss(h, index);
    result.relation = l2;
    scale_inplace(g2, cfg.alpha2);
    add_inplace(result.grad, g2);
  }
  result.total = result.alignment + cfg.alpha2 * result.relation;
  return result;
}

}  // namespace alinet
