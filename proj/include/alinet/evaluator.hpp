#pragma once

#include <map>
#include <string>
#include <vector>

#include "alinet/kg.hpp"
#include "alinet/matrix.hpp"
#include "alinet/model.hpp"

namespace alinet {

enum class Similarity { euclidean, cosine, csls };

std::string similarity_name(Similarity s);
Similarity similarity_from_name(const std::string& name);

struct EvalConfig {
  Similarity similarity = Similarity::csls;
  int csls_k = 10;
  std::vector<int> hits_ks = {1, 10};
  // Source rows per tile when building similarity matrices; results are
  // independent of this.
  int tile_rows = 1024;

  void validate() const;
};

struct EvalReport {
  std::map<int, double> hits;  // k -> Hits@k
  double mrr = 0.0;
  int num_test_pairs = 0;
  double mean_overlap_coefficient = 0.0;

  double hits_at(int k) const;
};

// Per-source full candidate orderings, best first.
struct Ranking {
  std::vector<int> sources;                // side-1 entity ids
  std::vector<int> targets;                // side-2 entity ids
  std::vector<std::vector<int>> ranked;    // parallel to sources
};

// Ranks every target for every source by the configured similarity
// (CSLS = 2 cos(x,y) - r_T(y) - r_S(x) with mean-top-k hub terms). Ties
// break by ascending entity id.
Ranking predict_alignment(const Matrix& h, const std::vector<int>& source_ids,
                          const std::vector<int>& target_ids, const EvalConfig& cfg);

// Hits@k and MRR of the true counterparts' ranks. Throws EvalError if a test
// source or its counterpart is missing from the ranking.
EvalReport compute_metrics(const Ranking& ranking, const AlignmentSet& test,
                           const std::vector<int>& hits_ks);

// Overlap coefficient of one-hop neighborhoods: |mapped(N1(e1)) ∩ N1(e2)|
// over the smaller of the two sets, mapping side-1 neighbors through the
// reference alignment. (e1, e2) must itself be a reference pair.
double overlap_coefficient(int e1, int e2, const NeighborStructure& structure,
                           const AlignmentSet& reference);

// Mean OC over the test pairs whose top-ranked candidate is correct.
double mean_overlap_of_correct(const Ranking& ranking, const AlignmentSet& test,
                               const NeighborStructure& structure,
                               const AlignmentSet& reference);

// Convenience wrapper: rank, score and attach the overlap statistic.
EvalReport evaluate(const Matrix& h, const AlignmentSet& test, const EvalConfig& cfg,
                    const NeighborStructure* structure = nullptr,
                    const AlignmentSet* reference = nullptr);

// Reports for the input features, each layer's normalized output, and the
// combined representation, labeled "input", "layer1", ..., "combined".
std::vector<std::pair<std::string, EvalReport>> evaluate_layers(
    const ForwardTrace& trace, const Matrix& input_features, const AlignmentSet& test,
    const EvalConfig& cfg);

}  // namespace alinet
