#include "alinet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "alinet/errors.hpp"
#include "alinet/numerics.hpp"

namespace alinet {

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw ConfigError("train: learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (max_epochs < 0) throw ConfigError("train: max_epochs must be >= 0");
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
  if (eval_every < 1) throw ConfigError("train: eval_every must be >= 1");
  loss.validate();
  model.validate();
}

namespace {

double validation_hits1(const Matrix& combined, const AlignmentSet& validation) {
  EvalConfig cfg;
  cfg.similarity = Similarity::csls;
  cfg.csls_k = 10;
  cfg.hits_ks = {1};
  return evaluate(combined, validation, cfg).hits_at(1);
}

}  // namespace

TrainResult train(const KnowledgeGraphPair& pair, const AlignmentSet& seed,
                  const AlignmentSet& validation, const TrainConfig& cfg) {
  cfg.validate();
  if (seed.empty()) throw ConfigError("train: empty seed alignment");
  validate_alignment(pair, seed, "train seed");
  validate_alignment(pair, validation, "train validation");

  const KnowledgeGraphPair graph =
      cfg.use_augmentation ? augment_neighborhood(pair, seed) : pair;
  const NeighborStructure structure =
      build_neighbor_structure(graph, std::max(2, cfg.model.hops));
  const RelationIndex rel_index = build_relation_index(graph);

  Rng rng(cfg.rng_seed);
  ParameterSet params = init_parameters(cfg.model, graph.num_entities, rng);

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  AdamState adam = AdamState::init(
      const_cast<const ParameterSet&>(params).tensor_ptrs(), adam_cfg);

  TrainResult result;
  result.params = params;  // returned as-is when no evaluation ever runs
  TrainHistory& history = result.history;
  int evals_without_improvement = 0;
  bool have_snapshot = false;

  std::vector<std::pair<int, int>> positives = seed.pairs;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(positives);
    AlignmentSet shuffled;
    shuffled.pairs = positives;
    NegativeSet negatives =
        sample_negatives(shuffled, graph, cfg.loss.negatives_per_pair, rng, epoch);

    EpochStats stats;
    stats.epoch = epoch;
    const int num_pos = static_cast<int>(positives.size());
    for (int start = 0; start < num_pos; start += cfg.batch_size) {
      const int stop = std::min(num_pos, start + cfg.batch_size);
      AlignmentSet batch;
      batch.pairs.assign(positives.begin() + start, positives.begin() + stop);
      NegativeSet batch_negs;
      batch_negs.epoch = epoch;
      const std::size_t per = cfg.loss.negatives_per_pair;
      batch_negs.pairs.assign(negatives.pairs.begin() + start * per,
                              negatives.pairs.begin() + stop * per);

      ForwardTrace trace = forward(params, structure, cfg.model);
      LossResult loss = total_loss(trace.final, batch, batch_negs, rel_index, cfg.loss);
      if (!std::isfinite(loss.total)) {
        throw DivergenceError("train: non-finite loss at epoch " +
                              std::to_string(epoch));
      }
      stats.loss += loss.total;
      stats.alignment_loss += loss.alignment;
      stats.relation_loss += loss.relation;

      ParameterSet grads = backward(trace, structure, params, loss.grad);
      adam_step(params.tensor_ptrs(),
                const_cast<const ParameterSet&>(grads).tensor_ptrs(), adam);
    }

    if (!validation.empty() && epoch % cfg.eval_every == 0) {
      ForwardTrace trace = forward(params, structure, cfg.model);
      stats.val_hits1 = validation_hits1(trace.final, validation);
      if (!have_snapshot || stats.val_hits1 > history.best_val_hits1) {
        evals_without_improvement = 0;
      } else {
        evals_without_improvement += 1;
      }
      // Keep the latest parameters among evaluations tied at the best score;
      // later epochs have had more optimization at equal validation quality.
      if (!have_snapshot || stats.val_hits1 >= history.best_val_hits1) {
        history.best_val_hits1 = stats.val_hits1;
        history.best_epoch = epoch;
        result.params = params;
        have_snapshot = true;
      }
    }
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.epochs.push_back(stats);
    if (!validation.empty() && evals_without_improvement >= cfg.patience) break;
  }

  if (!have_snapshot) result.params = std::move(params);
  return result;
}

std::pair<AlignmentSet, AlignmentSet> carve_validation(const AlignmentSet& seed,
                                                       double validation_fraction,
                                                       std::uint64_t rng_seed) {
  if (validation_fraction <= 0.0 || seed.size() < 2) {
    return {seed, AlignmentSet{}};
  }
  auto [validation, train] =
      split_alignment(seed, validation_fraction, rng_seed);
  if (validation.empty()) return {seed, AlignmentSet{}};
  return {std::move(train), std::move(validation)};
}

namespace {

constexpr const char* kCheckpointMagic = "alinet-checkpoint v1";

nlohmann::json model_config_json(const ModelConfig& c) {
  return {{"layer_dims", c.layer_dims},
          {"hops", c.hops},
          {"variant", variant_name(c.variant)},
          {"gate_activation", act_name(c.gate_activation)},
          {"aggregation_activation", act_name(c.aggregation_activation)},
          {"leaky_slope", c.leaky_slope}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  c.hops = j.at("hops").get<int>();
  c.variant = variant_from_name(j.at("variant").get<std::string>());
  c.gate_activation = act_from_name(j.at("gate_activation").get<std::string>());
  c.aggregation_activation =
      act_from_name(j.at("aggregation_activation").get<std::string>());
  c.leaky_slope = j.at("leaky_slope").get<double>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const ModelConfig& config) {
  std::ofstream out(path);
  if (!out) throw FormatError("checkpoint: cannot write '" + path + "'");
  out << kCheckpointMagic << '\n';
  out << "config " << model_config_json(config).dump() << '\n';
  int count = 0;
  params.for_each_tensor([&](const std::string&, const Matrix&) { ++count; });
  out << "tensors " << count << '\n';
  params.for_each_tensor([&](const std::string& name, const Matrix& m) {
    write_matrix(out, name, m);
  });
  if (!out) throw FormatError("checkpoint: write failed for '" + path + "'");
}

std::pair<ParameterSet, ModelConfig> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("checkpoint: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) {
    throw FormatError("checkpoint: bad magic in '" + path + "'");
  }
  if (!std::getline(in, line) || line.rfind("config ", 0) != 0) {
    throw FormatError("checkpoint: missing config block");
  }
  ModelConfig config;
  try {
    config = model_config_from_json(nlohmann::json::parse(line.substr(7)));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad config block: ") + e.what());
  }
  config.validate();
  if (!std::getline(in, line) || line.rfind("tensors ", 0) != 0) {
    throw FormatError("checkpoint: missing tensor count");
  }
  const int count = std::stoi(line.substr(8));

  std::vector<std::pair<std::string, Matrix>> tensors;
  tensors.reserve(count);
  for (int i = 0; i < count; ++i) tensors.push_back(read_matrix(in));
  if (tensors.empty() || tensors.front().first != "H0") {
    throw FormatError("checkpoint: first tensor must be H0");
  }

  // Shape the parameter set from the config, then fill and cross-check.
  Rng rng(0);
  ParameterSet params =
      init_parameters(config, tensors.front().second.rows, rng);
  std::size_t next = 0;
  params.for_each_tensor([&](const std::string& name, Matrix& m) {
    if (next >= tensors.size()) {
      throw FormatError("checkpoint: missing tensor '" + name + "'");
    }
    auto& [got_name, got] = tensors[next++];
    if (got_name != name) {
      throw FormatError("checkpoint: expected tensor '" + name + "', found '" +
                        got_name + "'");
    }
    if (got.rows != m.rows || got.cols != m.cols) {
      throw ConfigError("checkpoint: tensor '" + name + "' has shape " +
                        std::to_string(got.rows) + "x" + std::to_string(got.cols) +
                        ", config expects " + std::to_string(m.rows) + "x" +
                        std::to_string(m.cols));
    }
    m = std::move(got);
  });
  if (next != tensors.size()) {
    throw FormatError("checkpoint: unexpected extra tensors");
  }
  return {std::move(params), config};
}

void write_history_tsv(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw FormatError("history: cannot write '" + path + "'");
  out << "epoch\tloss\tl1\tl2\tval_hits1\tseconds\n";
  char buf[160];
  for (const EpochStats& e : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.9g\t%.6g\t%.3f\n", e.epoch,
                  e.loss, e.alignment_loss, e.relation_loss, e.val_hits1, e.seconds);
    out << buf;
  }
}

}  // namespace alinet
