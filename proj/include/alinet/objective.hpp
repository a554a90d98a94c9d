#pragma once

#include <utility>
#include <vector>

#include "alinet/kg.hpp"
#include "alinet/matrix.hpp"
#include "alinet/random.hpp"

namespace alinet {

struct LossConfig {
  double margin = 1.5;           // lambda
  double alpha1 = 0.1;           // negative-sample weight
  double alpha2 = 0.01;          // relation-loss weight
  int negatives_per_pair = 10;

  void validate() const;
};

// Corrupted alignment pairs, `negatives_per_pair` per positive, in positive
// order. None of them occurs in the positive set they were sampled against.
struct NegativeSet {
  std::vector<std::pair<int, int>> pairs;
  int epoch = 0;
};

// Subject-object pairs per relation, for relations with at least one pair.
// The augmentation relation is excluded.
struct RelationIndex {
  std::vector<int> relations;
  std::vector<std::vector<std::pair<int, int>>> pairs;

  std::size_t num_relations() const { return relations.size(); }
};

RelationIndex build_relation_index(const KnowledgeGraphPair& pair);

// For each positive pair, `count` corrupted copies: one side chosen
// uniformly, the entity on that side replaced by a uniform draw from the
// same side's entity set, re-drawn on collision with the positive set.
NegativeSet sample_negatives(const AlignmentSet& positives,
                             const KnowledgeGraphPair& pair, int count, Rng& rng,
                             int epoch = 0);

// sum ||h_i - h_j||  +  alpha1 * sum [margin - ||h_i' - h_j'||]+
// over combined representations; returns the loss and its gradient w.r.t. h.
// The norm subgradient at coincident embeddings and at the hinge kink is 0.
std::pair<double, Matrix> alignment_loss(const Matrix& h, const AlignmentSet& positives,
                                         const NegativeSet& negatives,
                                         const LossConfig& cfg);

// Row r: mean of (h_s - h_o) over the relation's pairs.
Matrix relation_representation(const Matrix& h, const RelationIndex& index);

// sum_r (1/|T_r|) sum ||h_s - h_o - r||, differentiating through r.
std::pair<double, Matrix> relation_loss(const Matrix& h, const RelationIndex& index);

struct LossResult {
  double total = 0.0;
  double alignment = 0.0;  // L1
  double relation = 0.0;   // L2
  Matrix grad;             // d total / d h
};

// L = L1 + alpha2 * L2
LossResult total_loss(const Matrix& h, const AlignmentSet& positives,
                      const NegativeSet& negatives, const RelationIndex& index,
                      const LossConfig& cfg);

}  // namespace alinet
