// Acceptance suite: one line per criterion, nonzero exit when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alinet/errors.hpp"
#include "alinet/evaluator.hpp"
#include "alinet/gradcheck.hpp"
#include "alinet/numerics.hpp"
#include "alinet/run_config.hpp"
#include "alinet/trainer.hpp"

using namespace alinet;

namespace {

int g_failures = 0;

void verdict(int criterion, bool passed, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", passed ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!passed) g_failures += 1;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix random_dense(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

SparseMatrix random_mask_with_diagonal(int n, double density, Rng& rng) {
  std::vector<std::tuple<int, int, double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 1.0);
    for (int j = 0; j < n; ++j) {
      if (j != i && rng.uniform() < density) t.emplace_back(i, j, 1.0);
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  GradcheckConfig cfg;  // 10 entities, 2 relations, dims [8,6,4], h = 1e-5
  GradcheckResult result = run_gradcheck(cfg);

  const std::vector<std::string> required = {"H0",  "_W",       "_hop2_W",
                                             "_M1", "_M2",      "_gate1_M",
                                             "_gate1_b"};
  bool all_present = true;
  for (const auto& needle : required) {
    bool found = false;
    for (const auto& t : result.tensors) {
      if (t.name.find(needle) != std::string::npos) found = true;
    }
    all_present = all_present && found;
  }
  const double secs = seconds_since(t0);
  const bool ok = result.max_rel_error < 1e-4 && all_present && secs < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "analytic vs central-difference gradients on all %zu tensors: "
                "max relative error %.2e (tolerance 1e-4, worst '%s'), %.1fs",
                result.tensors.size(), result.max_rel_error,
                result.worst_tensor.c_str(), secs);
  verdict(1, ok, buf);
}

// ---------------------------------------------------------------- criterion 2

double check_spmm(Rng& rng) {
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const int m = 1 + static_cast<int>(rng.below(50));
    const int c = 1 + static_cast<int>(rng.below(12));
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        if (rng.uniform() < 0.25) t.emplace_back(i, j, rng.uniform(-2.0, 2.0));
      }
    }
    SparseMatrix a = SparseMatrix::from_triplets(n, m, std::move(t));
    Matrix b = random_dense(m, c, rng);
    Matrix got = spmm(a, b);
    Matrix dense = a.to_dense();
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += dense(i, j) * b(j, k);
        worst = std::max(worst, std::abs(acc - got(i, k)));
      }
    }
  }
  return worst;
}

double check_masked_softmax(Rng& rng) {
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + static_cast<int>(rng.below(49));
    SparseMatrix mask = random_mask_with_diagonal(n, 0.2, rng);
    Matrix scores = random_dense(n, n, rng, -4.0, 4.0);
    SparseMatrix w = masked_row_softmax(scores, mask);
    for (int i = 0; i < n; ++i) {
      double denom = 0.0;
      for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
        denom += std::exp(scores(i, mask.col_idx[k]));
      }
      for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
        const double expected = std::exp(scores(i, mask.col_idx[k])) / denom;
        worst = std::max(worst, std::abs(w.values[k] - expected));
      }
    }
  }
  return worst;
}

double check_attention(Rng& rng) {
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + static_cast<int>(rng.below(49));
    const int d = 1 + static_cast<int>(rng.below(8));
    const int a = 1 + static_cast<int>(rng.below(8));
    SparseMatrix mask = random_mask_with_diagonal(n, 0.15, rng);
    Matrix h = random_dense(n, d, rng);
    Matrix m1 = random_dense(a, d, rng);
    Matrix m2 = random_dense(a, d, rng);
    SparseMatrix alpha = attention_weights(h, m1, m2, mask, 0.2);

    Matrix p = matmul_nt(h, m1);
    Matrix q = matmul_nt(h, m2);
    for (int i = 0; i < n; ++i) {
      double denom = 0.0;
      std::vector<double> expv;
      for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
        double s = 0.0;
        for (int x = 0; x < a; ++x) s += p(i, x) * q(mask.col_idx[k], x);
        s = s > 0 ? s : 0.2 * s;
        expv.push_back(std::exp(s));
        denom += expv.back();
      }
      int at = 0;
      for (int k = mask.row_begin(i); k < mask.row_end(i); ++k, ++at) {
        worst = std::max(worst, std::abs(alpha.values[k] - expv[at] / denom));
      }
    }
  }
  return worst;
}

double check_aggregates(Rng& rng) {
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    SyntheticConfig scfg;
    scfg.num_entities_per_side = 4 + static_cast<int>(rng.below(22));  // <= 50 total
    scfg.num_relations = 2;
    scfg.avg_degree = 2.5;
    scfg.rewire_fraction = 0.2;
    scfg.rng_seed = rng.next();
    auto [pair, seed, test] = generate_synthetic_pair(scfg);
    NeighborStructure s = build_neighbor_structure(pair, 2);
    const int n = pair.num_entities;
    const int d_in = 3, d_out = 3;
    Matrix h = random_dense(n, d_in, rng);
    Matrix w = random_dense(d_in, d_out, rng);

    Matrix one = one_hop_aggregate(h, s.adj_norm, w, Act::tanh);
    Matrix hw = matmul(h, w);
    for (int i = 0; i < n; ++i) {
      const auto& n1 = s.one_hop()[i];
      for (int dd = 0; dd < d_out; ++dd) {
        double acc = hw(i, dd);
        for (int j : n1) acc += hw(j, dd);
        acc = std::tanh(acc / (1.0 + n1.size()));
        worst = std::max(worst, std::abs(acc - one(i, dd)));
      }
    }

    // two-hop path with uniform attention over the mask
    const SparseMatrix& mask = s.two_hop_mask();
    std::vector<double> vals(mask.values.size());
    for (int i = 0; i < n; ++i) {
      const int deg = mask.row_end(i) - mask.row_begin(i);
      for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) vals[k] = 1.0 / deg;
    }
    SparseMatrix alpha = mask.with_values(vals);
    Matrix two = two_hop_aggregate(h, alpha, w, Act::tanh);
    for (int i = 0; i < n; ++i) {
      for (int dd = 0; dd < d_out; ++dd) {
        double acc = 0.0;
        for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
          acc += alpha.values[k] * hw(mask.col_idx[k], dd);
        }
        worst = std::max(worst, std::abs(std::tanh(acc) - two(i, dd)));
      }
    }
  }
  return worst;
}

bool check_csls(Rng& rng) {
  for (int iter = 0; iter < 100; ++iter) {
    const int ns = 2 + static_cast<int>(rng.below(24));
    const int nt = 2 + static_cast<int>(rng.below(24));
    Matrix h = random_dense(ns + nt, 4, rng);
    std::vector<int> sources, targets;
    for (int i = 0; i < ns; ++i) sources.push_back(i);
    for (int j = 0; j < nt; ++j) targets.push_back(ns + j);
    EvalConfig cfg;
    cfg.similarity = Similarity::csls;
    cfg.csls_k = 1 + static_cast<int>(rng.below(10));
    Ranking got = predict_alignment(h, sources, targets, cfg);

    // brute force: all cosines, exact hub means, same tie-break
    auto cosine = [&](int a, int b) {
      double dot = 0, na = 0, nb = 0;
      for (int d = 0; d < h.cols; ++d) {
        dot += h(a, d) * h(b, d);
        na += h(a, d) * h(a, d);
        nb += h(b, d) * h(b, d);
      }
      if (na == 0.0 || nb == 0.0) return 0.0;
      return dot / (std::sqrt(na) * std::sqrt(nb));
    };
    const int kt = std::min(cfg.csls_k, nt), ks = std::min(cfg.csls_k, ns);
    std::vector<double> rs(ns), rt(nt);
    for (int i = 0; i < ns; ++i) {
      std::vector<double> row(nt);
      for (int j = 0; j < nt; ++j) row[j] = cosine(sources[i], targets[j]);
      std::sort(row.begin(), row.end(), std::greater<double>());
      double s = 0;
      for (int x = 0; x < kt; ++x) s += row[x];
      rs[i] = s / kt;
    }
    for (int j = 0; j < nt; ++j) {
      std::vector<double> col(ns);
      for (int i = 0; i < ns; ++i) col[i] = cosine(sources[i], targets[j]);
      std::sort(col.begin(), col.end(), std::greater<double>());
      double s = 0;
      for (int x = 0; x < ks; ++x) s += col[x];
      rt[j] = s / ks;
    }
    for (int i = 0; i < ns; ++i) {
      std::vector<int> order(nt);
      for (int j = 0; j < nt; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = 2.0 * cosine(sources[i], targets[a]) - rs[i] - rt[a];
        const double sb = 2.0 * cosine(sources[i], targets[b]) - rs[i] - rt[b];
        if (sa != sb) return sa > sb;
        return targets[a] < targets[b];
      });
      for (int j = 0; j < nt; ++j) {
        if (got.ranked[i][j] != targets[order[j]]) return false;
      }
    }
  }
  return true;
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  const double w_spmm = check_spmm(rng);
  const double w_soft = check_masked_softmax(rng);
  const double w_attn = check_attention(rng);
  const double w_aggr = check_aggregates(rng);
  const bool csls_ok = check_csls(rng);
  const double secs = seconds_since(t0);
  const double worst = std::max({w_spmm, w_soft, w_attn, w_aggr});
  const bool ok = worst < 1e-12 && csls_ok && secs < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "kernel oracles on 100 random instances each: spmm %.1e, "
                "softmax %.1e, attention %.1e, aggregation %.1e (tolerance "
                "1e-12), csls rankings %s, %.1fs",
                w_spmm, w_soft, w_attn, w_aggr,
                csls_ok ? "identical" : "DIFFER", secs);
  verdict(2, ok, buf);
}

// ------------------------------------------------------- criteria 3 through 6

struct ExperimentResult {
  double test_hits1 = 0.0;
  std::size_t triples_before = 0;
  std::size_t triples_after = 0;  // equal unless augmentation ran
};

ExperimentResult run_experiment(std::uint64_t seed, double rewire, Variant variant,
                                double alpha2, bool augmentation) {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 200;
  scfg.num_relations = 4;
  scfg.avg_degree = 4.0;
  scfg.rewire_fraction = rewire;
  scfg.seed_alignment_fraction = 0.3;
  scfg.rng_seed = seed;
  auto [pair, seed_pairs, test] = generate_synthetic_pair(scfg);

  TrainConfig cfg;
  cfg.model.layer_dims = {64, 64, 64};
  cfg.model.variant = variant;
  cfg.loss.alpha2 = alpha2;
  cfg.max_epochs = 200;  // fixed budget, no validation carve / early stopping
  cfg.rng_seed = seed;
  cfg.use_augmentation = augmentation;
  TrainResult result = train(pair, seed_pairs, AlignmentSet{}, cfg);

  const KnowledgeGraphPair graph =
      augmentation ? augment_neighborhood(pair, seed_pairs) : pair;
  NeighborStructure structure = build_neighbor_structure(graph, 2);
  ForwardTrace trace = forward(result.params, structure, cfg.model);
  EvalConfig ecfg;
  ecfg.similarity = Similarity::csls;
  ecfg.hits_ks = {1};
  ExperimentResult out;
  out.test_hits1 = evaluate(trace.final, test, ecfg).hits_at(1);
  out.triples_before = pair.triples.size();
  out.triples_after = graph.triples.size();
  return out;
}

void criteria_3_to_6() {
  // criterion 3: isomorphic recovery, 3 seeds
  {
    const auto t0 = std::chrono::steady_clock::now();
    double sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
      sum += run_experiment(seed, 0.0, Variant::alinet, 0.01, false).test_hits1;
    }
    const double mean = sum / 3.0;
    const double secs = seconds_since(t0);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "isomorphic recovery (p=0, 3 seeds, 200 epochs): mean test "
                  "Hits@1 %.4f (gate 0.95), %.0fs",
                  mean, secs);
    verdict(3, mean >= 0.95 && secs < 600.0, buf);
  }

  // criteria 4+5 share the p=0.2 runs
  double ali = 0, gcn = 0, mix = 0, addv = 0;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    ali += run_experiment(seed, 0.2, Variant::alinet, 0.01, false).test_hits1;
    gcn += run_experiment(seed, 0.2, Variant::gcn_only, 0.01, false).test_hits1;
    mix += run_experiment(seed, 0.2, Variant::mix, 0.01, false).test_hits1;
    addv += run_experiment(seed, 0.2, Variant::add, 0.01, false).test_hits1;
  }
  ali /= 5;
  gcn /= 5;
  mix /= 5;
  addv /= 5;
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "non-isomorphism benefit (p=0.2, 5 seeds): AliNet %.4f vs "
                  "gcn_only %.4f, gap %+.4f (gate +0.02)",
                  ali, gcn, ali - gcn);
    verdict(4, ali - gcn >= 0.02, buf);
  }
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "ablation ordering: mix %.4f < AliNet %.4f (strict), add "
                  "%.4f <= AliNet+0.01 (%.4f)",
                  mix, ali, addv, ali + 0.01);
    verdict(5, mix < ali && addv <= ali + 0.01, buf);
  }

  // criterion 6: relation loss and augmentation effects
  {
    ExperimentResult base = run_experiment(1, 0.2, Variant::alinet, 0.01, false);
    ExperimentResult norel = run_experiment(1, 0.2, Variant::alinet, 0.0, false);
    ExperimentResult aug = run_experiment(1, 0.2, Variant::alinet, 0.01, true);
    const long added =
        static_cast<long>(aug.triples_after) - static_cast<long>(aug.triples_before);
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "relation-loss delta %+.4f, augmentation delta %+.4f "
                  "(reported, not asserted); augmentation added %ld edges "
                  "(gate >= 1); all configurations ran to completion",
                  base.test_hits1 - norel.test_hits1,
                  aug.test_hits1 - base.test_hits1, added);
    verdict(6, added >= 1, buf);
  }
}

// ---------------------------------------------------------------- criterion 7

bool invariant_neighbor_structure(std::string& why) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SyntheticConfig scfg;
    scfg.num_entities_per_side = 5 + static_cast<int>(seed * 4);
    scfg.avg_degree = 2.5;
    scfg.rewire_fraction = 0.3;
    scfg.rng_seed = seed;
    auto [pair, sa, ta] = generate_synthetic_pair(scfg);
    NeighborStructure s = build_neighbor_structure(pair, 2);
    for (int i = 0; i < pair.num_entities; ++i) {
      double sum = 0.0;
      for (int k = s.adj_norm.row_begin(i); k < s.adj_norm.row_end(i); ++k) {
        sum += s.adj_norm.values[k];
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        why = "adjacency row does not sum to 1";
        return false;
      }
      if (s.adj_norm.row_end(i) - s.adj_norm.row_begin(i) !=
          static_cast<int>(s.one_hop()[i].size()) + 1) {
        why = "adjacency nnz != |N1|+1";
        return false;
      }
      for (int j : s.one_hop()[i]) {
        if (j == i) {
          why = "self in N1";
          return false;
        }
      }
      for (int j : s.two_hop()[i]) {
        if (j == i || std::binary_search(s.one_hop()[i].begin(),
                                         s.one_hop()[i].end(), j)) {
          why = "N2 overlaps N1 or self";
          return false;
        }
      }
    }
  }
  return true;
}

bool invariant_augment(std::string& why) {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 30;
  scfg.avg_degree = 3.0;
  scfg.rewire_fraction = 0.25;
  scfg.seed_alignment_fraction = 0.5;
  scfg.rng_seed = 17;
  auto [pair, seed, test] = generate_synthetic_pair(scfg);
  KnowledgeGraphPair once = augment_neighborhood(pair, seed);
  KnowledgeGraphPair twice = augment_neighborhood(once, seed);
  if (once.triples.size() < pair.triples.size()) {
    why = "augmentation removed triples";
    return false;
  }
  for (std::size_t i = 0; i < pair.triples.size(); ++i) {
    if (!(pair.triples[i] == once.triples[i])) {
      why = "augmentation reordered originals";
      return false;
    }
  }
  if (twice.triples.size() != once.triples.size()) {
    why = "augmentation is not idempotent";
    return false;
  }
  return true;
}

bool invariant_synthetic(std::string& why) {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 40;
  scfg.rewire_fraction = 0.0;
  scfg.rng_seed = 3;
  auto [p1, s1, t1] = generate_synthetic_pair(scfg);
  auto [p2, s2, t2] = generate_synthetic_pair(scfg);
  if (!(p1.triples == p2.triples) || s1.pairs != s2.pairs || t1.pairs != t2.pairs) {
    why = "generator is not deterministic";
    return false;
  }
  std::multiset<std::pair<int, int>> e1, e2;
  const int n = scfg.num_entities_per_side;
  for (const Triple& t : p1.triples) {
    int a = t.head, b = t.tail;
    const bool side2 = p1.side_of(t.head) == 2;
    if (side2) {
      a -= n;
      b -= n;
    }
    if (a > b) std::swap(a, b);
    (side2 ? e2 : e1).emplace(a, b);
  }
  if (e1 != e2) {
    why = "p=0 graphs are not isomorphic under the renaming";
    return false;
  }
  return true;
}

bool invariant_model(std::string& why) {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 12;
  scfg.avg_degree = 2.5;
  scfg.rewire_fraction = 0.2;
  scfg.rng_seed = 11;
  auto [pair, seed, test] = generate_synthetic_pair(scfg);
  NeighborStructure s = build_neighbor_structure(pair, 2);
  ModelConfig cfg;
  cfg.layer_dims = {6, 5, 4};
  Rng rng(41);
  ParameterSet params = init_parameters(cfg, pair.num_entities, rng);
  ForwardTrace trace = forward(params, s, cfg);
  for (const auto& lt : trace.layers) {
    for (const auto& ht : lt.hop) {
      for (int i = 0; i < ht.alpha.rows; ++i) {
        double sum = 0.0;
        for (int k = ht.alpha.row_begin(i); k < ht.alpha.row_end(i); ++k) {
          if (ht.alpha.values[k] < 0.0) {
            why = "negative attention weight";
            return false;
          }
          sum += ht.alpha.values[k];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          why = "attention row does not sum to 1";
          return false;
        }
      }
    }
  }

  // permutation equivariance (rotate each side)
  const int n = pair.num_entities, n1 = pair.num_entities1;
  std::vector<int> perm(n);
  for (int i = 0; i < n1; ++i) perm[i] = (i + 1) % n1;
  for (int i = n1; i < n; ++i) perm[i] = n1 + (i - n1 + 1) % (n - n1);
  KnowledgeGraphPair relabeled = pair;
  for (Triple& t : relabeled.triples) {
    t.head = perm[t.head];
    t.tail = perm[t.tail];
  }
  NeighborStructure s2 = build_neighbor_structure(relabeled, 2);
  ParameterSet moved = params;
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < cfg.layer_dims[0]; ++d) {
      moved.input_features(perm[i], d) = params.input_features(i, d);
    }
  }
  ForwardTrace mt = forward(moved, s2, cfg);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < trace.final.cols; ++d) {
      if (std::abs(mt.final(perm[i], d) - trace.final(i, d)) > 1e-12) {
        why = "permutation equivariance violated";
        return false;
      }
    }
  }
  return true;
}

bool invariant_losses(std::string& why) {
  Rng rng(42);
  Matrix h = random_dense(10, 4, rng);
  AlignmentSet pos;
  pos.pairs = {{0, 5}, {1, 6}};
  NegativeSet negs;
  negs.pairs = {{0, 6}, {2, 7}, {3, 8}};
  RelationIndex idx;
  idx.relations = {0};
  idx.pairs = {{{0, 1}, {2, 3}, {4, 0}}};
  LossConfig cfg;
  LossResult base = total_loss(h, pos, negs, idx, cfg);
  if (base.total < 0.0 || base.alignment < 0.0 || base.relation < 0.0) {
    why = "negative loss";
    return false;
  }
  auto loss_fn = [&]() { return total_loss(h, pos, negs, idx, cfg).total; };
  if (finite_diff_check(loss_fn, h, base.grad, 1e-6) >= 1e-4) {
    why = "loss gradient fails finite differences";
    return false;
  }
  return true;
}

bool invariant_numerics(std::string& why) {
  Rng rng(43);
  Matrix m = random_dense(7, 5, rng);
  Matrix n1 = l2_normalize_rows(m);
  if (max_abs_diff(l2_normalize_rows(n1), n1) > 1e-15) {
    why = "l2 normalization is not idempotent";
    return false;
  }
  Matrix p(3, 3, 0.7);
  Matrix zero(3, 3);
  Matrix before = p;
  AdamState st = AdamState::init({&p}, AdamConfig{});
  adam_step({&p}, {&zero}, st);
  if (max_abs_diff(p, before) != 0.0) {
    why = "adam moved parameters under zero gradients";
    return false;
  }
  for (int iter = 0; iter < 30; ++iter) {
    const int r = 1 + static_cast<int>(rng.below(20));
    const int c = 1 + static_cast<int>(rng.below(20));
    Matrix x = xavier_init(r, c, rng);
    const double bound = std::sqrt(6.0 / (r + c));
    for (double v : x.data) {
      if (std::abs(v) > bound) {
        why = "xavier sample left its bound";
        return false;
      }
    }
  }
  return true;
}

bool invariant_train_determinism(std::string& why) {
  SyntheticConfig scfg;
  scfg.num_entities_per_side = 30;
  scfg.avg_degree = 3.0;
  scfg.seed_alignment_fraction = 0.4;
  scfg.rng_seed = 19;
  auto [pair, seed, test] = generate_synthetic_pair(scfg);
  TrainConfig cfg;
  cfg.model.layer_dims = {8, 8};
  cfg.max_epochs = 6;
  cfg.rng_seed = 19;
  TrainResult a = train(pair, seed, AlignmentSet{}, cfg);
  TrainResult b = train(pair, seed, AlignmentSet{}, cfg);
  for (std::size_t i = 0; i < a.history.epochs.size(); ++i) {
    if (a.history.epochs[i].loss != b.history.epochs[i].loss) {
      why = "training losses differ across identical runs";
      return false;
    }
  }
  if (max_abs_diff(a.params.input_features, b.params.input_features) != 0.0) {
    why = "trained parameters differ across identical runs";
    return false;
  }
  return true;
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string why;
  struct Item {
    const char* name;
    bool ok;
  };
  std::vector<Item> items;
  items.push_back({"neighbor structure", invariant_neighbor_structure(why)});
  items.push_back({"augmentation", invariant_augment(why)});
  items.push_back({"synthetic generator", invariant_synthetic(why)});
  items.push_back({"model", invariant_model(why)});
  items.push_back({"losses", invariant_losses(why)});
  items.push_back({"numerics", invariant_numerics(why)});
  items.push_back({"train determinism", invariant_train_determinism(why)});
  bool ok = true;
  std::string detail = "invariant suites:";
  for (const auto& item : items) {
    ok = ok && item.ok;
    detail += std::string(" ") + item.name + (item.ok ? " ok," : " FAILED,");
  }
  const double secs = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof(buf), " %.0fs (budget 120s)", secs);
  detail += buf;
  if (!why.empty()) detail += " [" + why + "]";
  verdict(7, ok && secs < 120.0, detail);
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
  // Full-scale DBP15K reproduction is an optional long run; the gate here is
  // that the procedure and target band are documented.
  std::ifstream readme("README.md");
  std::stringstream ss;
  ss << readme.rdbuf();
  const std::string text = ss.str();
  const bool documented = readme.good() && text.find("DBP15K") != std::string::npos &&
                          text.find("0.539") != std::string::npos;
  verdict(8, documented,
          documented
              ? "full-scale DBP15K reproduction documented as an optional long "
                "run with its target band (not a desk-scale gate)"
              : "README.md does not document the DBP15K procedure");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criteria_3_to_6();
  criterion_7();
  criterion_8();
  std::printf("%s (%d criterion failures)\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures);
  return g_failures;
}
