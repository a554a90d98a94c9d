#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "alinet/errors.hpp"
#include "alinet/evaluator.hpp"
#include "alinet/numerics.hpp"

using namespace alinet;

namespace {

Matrix random_dense(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

double cosine(const Matrix& h, int a, int b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int d = 0; d < h.cols; ++d) {
    dot += h(a, d) * h(b, d);
    na += h(a, d) * h(a, d);
    nb += h(b, d) * h(b, d);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Brute-force CSLS: all cosines, exact hub terms, same tie-break.
std::vector<std::vector<int>> csls_oracle(const Matrix& h,
                                          const std::vector<int>& sources,
                                          const std::vector<int>& targets, int k) {
  const int ns = static_cast<int>(sources.size());
  const int nt = static_cast<int>(targets.size());
  Matrix cos(ns, nt);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) cos(i, j) = cosine(h, sources[i], targets[j]);
  }
  const int kt = std::min(k, nt), ks = std::min(k, ns);
  std::vector<double> rs(ns), rt(nt);
  for (int i = 0; i < ns; ++i) {
    std::vector<double> row(cos.row(i), cos.row(i) + nt);
    std::sort(row.begin(), row.end(), std::greater<double>());
    double s = 0.0;
    for (int x = 0; x < kt; ++x) s += row[x];
    rs[i] = s / kt;
  }
  for (int j = 0; j < nt; ++j) {
    std::vector<double> col;
    for (int i = 0; i < ns; ++i) col.push_back(cos(i, j));
    std::sort(col.begin(), col.end(), std::greater<double>());
    double s = 0.0;
    for (int x = 0; x < ks; ++x) s += col[x];
    rt[j] = s / ks;
  }
  std::vector<std::vector<int>> ranked(ns);
  for (int i = 0; i < ns; ++i) {
    std::vector<int> order(nt);
    for (int j = 0; j < nt; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double sa = 2.0 * cos(i, a) - rs[i] - rt[a];
      const double sb = 2.0 * cos(i, b) - rs[i] - rt[b];
      if (sa != sb) return sa > sb;
      return targets[a] < targets[b];
    });
    for (int j : order) ranked[i].push_back(targets[j]);
  }
  return ranked;
}

// Graph fixture for overlap tests: side 1 = {0..4}, side 2 = {5..13}.
struct OverlapFixture {
  KnowledgeGraphPair pair;
  NeighborStructure structure;
  AlignmentSet reference;

  OverlapFixture() {
    pair.num_entities = 14;
    pair.num_entities1 = 5;
    pair.num_relations = 2;
    pair.triples = {{0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4},
                    {5, 1, 6}, {5, 1, 7}, {5, 1, 10}, {5, 1, 11},
                    {5, 1, 12}, {5, 1, 13}};
    structure = build_neighbor_structure(pair);
    reference.pairs = {{0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9}};
  }
};

}  // namespace

TEST_CASE("a single candidate ranks first") {
  Matrix h(3, 2, 1.0);
  EvalConfig cfg;
  cfg.similarity = Similarity::euclidean;
  Ranking r = predict_alignment(h, {0}, {2}, cfg);
  REQUIRE(r.ranked.size() == 1);
  CHECK(r.ranked[0] == std::vector<int>{2});
}

TEST_CASE("euclidean ranking matches hand-sorted distances, ties by id") {
  Matrix h(5, 2);
  h(2, 0) = 1.0;                    // d = 1
  h(3, 1) = 2.0;                    // d = 2
  h(4, 0) = 3.0;                    // d = 3
  EvalConfig cfg;
  cfg.similarity = Similarity::euclidean;
  Ranking r = predict_alignment(h, {0}, {2, 3, 4}, cfg);
  CHECK(r.ranked[0] == std::vector<int>{2, 3, 4});

  Matrix tie(4, 2);
  tie(2, 0) = 1.0;
  tie(3, 0) = 1.0;  // same point as 2
  Ranking t = predict_alignment(tie, {0}, {3, 2}, cfg);
  CHECK(t.ranked[0] == std::vector<int>{2, 3});
}

TEST_CASE("csls ranking matches the brute-force oracle") {
  Rng rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    const int ns = 3 + static_cast<int>(rng.below(6));
    const int nt = 3 + static_cast<int>(rng.below(6));
    Matrix h = random_dense(ns + nt, 4, rng);
    std::vector<int> sources, targets;
    for (int i = 0; i < ns; ++i) sources.push_back(i);
    for (int j = 0; j < nt; ++j) targets.push_back(ns + j);
    EvalConfig cfg;
    cfg.similarity = Similarity::csls;
    cfg.csls_k = 3;
    Ranking got = predict_alignment(h, sources, targets, cfg);
    auto expected = csls_oracle(h, sources, targets, 3);
    for (int i = 0; i < ns; ++i) CHECK(got.ranked[i] == expected[i]);
  }
}

TEST_CASE("csls with k = |targets| uses the mean cosine over all candidates") {
  Rng rng(12);
  Matrix h = random_dense(10, 3, rng);
  std::vector<int> sources = {0, 1, 2, 3, 4};
  std::vector<int> targets = {5, 6, 7, 8, 9};
  EvalConfig cfg;
  cfg.similarity = Similarity::csls;
  cfg.csls_k = 5;
  Ranking got = predict_alignment(h, sources, targets, cfg);
  auto expected = csls_oracle(h, sources, targets, 5);
  for (std::size_t i = 0; i < sources.size(); ++i) CHECK(got.ranked[i] == expected[i]);
  // oversized k clamps to the candidate count
  cfg.csls_k = 50;
  Ranking clamped = predict_alignment(h, sources, targets, cfg);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    CHECK(clamped.ranked[i] == expected[i]);
  }
}

TEST_CASE("predict_alignment is deterministic and tile-size independent") {
  Rng rng(13);
  Matrix h = random_dense(40, 4, rng);
  std::vector<int> sources, targets;
  for (int i = 0; i < 20; ++i) sources.push_back(i);
  for (int j = 20; j < 40; ++j) targets.push_back(j);
  EvalConfig a;
  a.similarity = Similarity::csls;
  EvalConfig b = a;
  b.tile_rows = 3;
  Ranking ra = predict_alignment(h, sources, targets, a);
  Ranking rb = predict_alignment(h, sources, targets, b);
  for (std::size_t i = 0; i < sources.size(); ++i) CHECK(ra.ranked[i] == rb.ranked[i]);
}

TEST_CASE("metrics: perfect ranking and the 1-2 split") {
  Ranking r;
  r.sources = {0, 1};
  r.targets = {10, 11};
  r.ranked = {{10, 11}, {11, 10}};
  AlignmentSet test;
  test.pairs = {{0, 10}, {1, 11}};
  EvalReport perfect = compute_metrics(r, test, {1, 10});
  CHECK(perfect.hits_at(1) == doctest::Approx(1.0));
  CHECK(perfect.mrr == doctest::Approx(1.0));

  Ranking mixed;
  mixed.sources = {0, 1};
  mixed.targets = {10, 11};
  mixed.ranked = {{10, 11}, {10, 11}};  // second pair ranked 2nd
  EvalReport half = compute_metrics(mixed, test, {1, 2});
  CHECK(half.hits_at(1) == doctest::Approx(0.5));
  CHECK(half.hits_at(2) == doctest::Approx(1.0));
  CHECK(half.mrr == doctest::Approx(0.75));
  CHECK(half.num_test_pairs == 2);
}

TEST_CASE("metrics: missing counterpart is an evaluation error") {
  Ranking r;
  r.sources = {0};
  r.targets = {10};
  r.ranked = {{10}};
  AlignmentSet test;
  test.pairs = {{0, 11}};
  CHECK_THROWS_AS(compute_metrics(r, test, {1}), EvalError);
}

TEST_CASE("hits are monotone in k and bounded") {
  Rng rng(14);
  Matrix h = random_dense(30, 4, rng);
  std::vector<int> sources, targets;
  AlignmentSet test;
  for (int i = 0; i < 15; ++i) {
    sources.push_back(i);
    targets.push_back(15 + i);
    test.pairs.emplace_back(i, 15 + i);
  }
  EvalConfig cfg;
  cfg.similarity = Similarity::cosine;
  cfg.hits_ks = {1, 3, 5, 10, 15};
  Ranking r = predict_alignment(h, sources, targets, cfg);
  EvalReport report = compute_metrics(r, test, cfg.hits_ks);
  double prev = 0.0;
  for (int k : cfg.hits_ks) {
    const double hk = report.hits_at(k);
    CHECK(hk >= prev);
    CHECK(hk >= 0.0);
    CHECK(hk <= 1.0);
    prev = hk;
  }
  CHECK(report.mrr > 0.0);
  CHECK(report.mrr <= 1.0);
  CHECK(report.mrr >= report.hits_at(1));  // rank-1 pairs contribute 1 to both
}

TEST_CASE("euclidean ranking ignores translations; cosine and csls ignore scale") {
  Rng rng(15);
  Matrix h = random_dense(24, 5, rng);
  std::vector<int> sources, targets;
  for (int i = 0; i < 12; ++i) sources.push_back(i);
  for (int j = 12; j < 24; ++j) targets.push_back(j);

  EvalConfig eu;
  eu.similarity = Similarity::euclidean;
  Ranking base = predict_alignment(h, sources, targets, eu);
  Matrix shifted = h;
  for (int i = 0; i < h.rows; ++i) {
    for (int d = 0; d < h.cols; ++d) shifted(i, d) += 3.7 - 0.9 * d;
  }
  Ranking moved = predict_alignment(shifted, sources, targets, eu);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    CHECK(base.ranked[i] == moved.ranked[i]);
  }

  for (Similarity sim : {Similarity::cosine, Similarity::csls}) {
    EvalConfig cfg;
    cfg.similarity = sim;
    Ranking b = predict_alignment(h, sources, targets, cfg);
    Matrix scaled = h;
    scale_inplace(scaled, 4.25);
    Ranking s = predict_alignment(scaled, sources, targets, cfg);
    for (std::size_t i = 0; i < sources.size(); ++i) CHECK(b.ranked[i] == s.ranked[i]);
  }
}

TEST_CASE("overlap coefficient: identical, disjoint and partial neighborhoods") {
  OverlapFixture fx;
  // one-hop of 0 = {1,2,3,4}; mapped through the reference = {6,7,8,9};
  // one-hop of 5 = {6,7,10,11,12,13}; intersection = {6,7}; min size 4
  CHECK(overlap_coefficient(0, 5, fx.structure, fx.reference) ==
        doctest::Approx(0.5));

  // identical mapped neighborhoods
  KnowledgeGraphPair pair;
  pair.num_entities = 6;
  pair.num_entities1 = 3;
  pair.num_relations = 2;
  pair.triples = {{0, 0, 1}, {0, 0, 2}, {3, 1, 4}, {3, 1, 5}};
  NeighborStructure s = build_neighbor_structure(pair);
  AlignmentSet ref;
  ref.pairs = {{0, 3}, {1, 4}, {2, 5}};
  CHECK(overlap_coefficient(0, 3, s, ref) == doctest::Approx(1.0));

  // disjoint neighborhoods
  KnowledgeGraphPair pair2 = pair;
  pair2.triples = {{0, 0, 1}, {3, 1, 5}};
  NeighborStructure s2 = build_neighbor_structure(pair2);
  AlignmentSet ref2;
  ref2.pairs = {{0, 3}, {1, 4}, {2, 5}};
  CHECK(overlap_coefficient(0, 3, s2, ref2) == doctest::Approx(0.0));

  // not a reference pair
  CHECK_THROWS_AS(overlap_coefficient(0, 4, s, ref), ReferentialError);
}

TEST_CASE("evaluate_layers: four reports for two layers, combined matches evaluate") {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 12;
  scfg.avg_degree = 2.5;
  scfg.rng_seed = 4;
  auto [pair, seed, test] = generate_synthetic_pair(scfg);
  NeighborStructure structure = build_neighbor_structure(pair);
  ModelConfig mcfg;
  mcfg.layer_dims = {6, 5, 4};
  Rng rng(16);
  ParameterSet params = init_parameters(mcfg, pair.num_entities, rng);
  ForwardTrace trace = forward(params, structure, mcfg);

  EvalConfig cfg;
  cfg.similarity = Similarity::csls;
  cfg.hits_ks = {1};
  auto reports = evaluate_layers(trace, params.input_features, test, cfg);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].first == "input");
  CHECK(reports[1].first == "layer1");
  CHECK(reports[2].first == "layer2");
  CHECK(reports[3].first == "combined");

  EvalReport direct = evaluate(trace.final, test, cfg);
  CHECK(reports[3].second.hits_at(1) == doctest::Approx(direct.hits_at(1)));
  CHECK(reports[3].second.mrr == doctest::Approx(direct.mrr));
}
