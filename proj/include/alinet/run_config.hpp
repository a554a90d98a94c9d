#pragma once

#include <optional>
#include <string>

#include "alinet/evaluator.hpp"
#include "alinet/gradcheck.hpp"
#include "alinet/kg.hpp"
#include "alinet/trainer.hpp"

namespace alinet {

struct DatasetPaths {
  std::string triples1;
  std::string triples2;
  std::string links;
  double train_fraction = 0.3;
  std::uint64_t split_seed = 42;
};

// One JSON document drives every command. Defaults reproduce the reference
// hyperparameter setting; unknown keys are rejected by name.
struct RunConfig {
  std::optional<DatasetPaths> dataset;  // absent: use the synthetic generator
  SyntheticConfig synthetic;
  TrainConfig train;
  EvalConfig eval;
  GradcheckConfig gradcheck;
  double validation_fraction = 0.1;  // carved from the seed alignment
  std::string output_dir = "out";
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

// Loaded or generated inputs for one run.
struct PreparedData {
  KnowledgeGraphPair pair;
  AlignmentSet seed;        // training positives (validation already removed)
  AlignmentSet validation;
  AlignmentSet test;
  AlignmentSet reference;   // seed + validation + test
};

PreparedData prepare_data(const RunConfig& cfg);

}  // namespace alinet
