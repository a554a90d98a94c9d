#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alinet/evaluator.hpp"
#include "alinet/kg.hpp"
#include "alinet/model.hpp"
#include "alinet/objective.hpp"

namespace alinet {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 4500;
  int max_epochs = 200;
  int patience = 5;    // consecutive non-improving evaluations before stopping
  int eval_every = 1;  // epochs between validation evaluations
  std::uint64_t rng_seed = 42;
  LossConfig loss;
  ModelConfig model;
  bool use_augmentation = false;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double alignment_loss = 0.0;
  double relation_loss = 0.0;
  double val_hits1 = -1.0;  // -1 when the epoch was not evaluated
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 0 = no evaluation happened
  double best_val_hits1 = -1.0;
};

struct TrainResult {
  ParameterSet params;  // parameters from the best evaluation
  TrainHistory history;
};

// Full-graph forward per batch of alignment pairs, Adam per batch, negatives
// resampled every epoch, early stopping on validation Hits@1. Deterministic
// given cfg.rng_seed. Augmentation (when enabled) uses only `seed` pairs.
TrainResult train(const KnowledgeGraphPair& pair, const AlignmentSet& seed,
                  const AlignmentSet& validation, const TrainConfig& cfg);

// Carves a validation split off the seed alignment (deterministic).
std::pair<AlignmentSet, AlignmentSet> carve_validation(const AlignmentSet& seed,
                                                       double validation_fraction,
                                                       std::uint64_t rng_seed);

// Checkpoint: magic line, JSON model-config block, then every named tensor
// in the matrix text format. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const ModelConfig& config);
std::pair<ParameterSet, ModelConfig> load_checkpoint(const std::string& path);

// `epoch<TAB>loss<TAB>l1<TAB>l2<TAB>val_hits1<TAB>seconds` per epoch.
void write_history_tsv(const std::string& path, const TrainHistory& history);

}  // namespace alinet
