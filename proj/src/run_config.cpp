#include "alinet/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "alinet/errors.hpp"

namespace alinet {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config: unknown key '" +
                        (section.empty() ? it.key() : section + "." + it.key()) + "'");
    }
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

void parse_model(const json& obj, ModelConfig& model) {
  reject_unknown_keys(obj, "model",
                      {"layer_dims", "hops", "variant", "gate_activation",
                       "aggregation_activation", "leaky_slope"});
  read_if(obj, "layer_dims", model.layer_dims);
  read_if(obj, "hops", model.hops);
  if (auto it = obj.find("variant"); it != obj.end()) {
    model.variant = variant_from_name(it->get<std::string>());
  }
  if (auto it = obj.find("gate_activation"); it != obj.end()) {
    model.gate_activation = act_from_name(it->get<std::string>());
  }
  if (auto it = obj.find("aggregation_activation"); it != obj.end()) {
    model.aggregation_activation = act_from_name(it->get<std::string>());
  }
  read_if(obj, "leaky_slope", model.leaky_slope);
  model.validate();
}

void parse_loss(const json& obj, LossConfig& loss) {
  reject_unknown_keys(obj, "loss", {"margin", "alpha1", "alpha2", "negatives_per_pair"});
  read_if(obj, "margin", loss.margin);
  read_if(obj, "alpha1", loss.alpha1);
  read_if(obj, "alpha2", loss.alpha2);
  read_if(obj, "negatives_per_pair", loss.negatives_per_pair);
  loss.validate();
}

void parse_train(const json& obj, TrainConfig& train) {
  reject_unknown_keys(obj, "train",
                      {"learning_rate", "batch_size", "max_epochs", "patience",
                       "eval_every", "rng_seed", "use_augmentation"});
  read_if(obj, "learning_rate", train.learning_rate);
  read_if(obj, "batch_size", train.batch_size);
  read_if(obj, "max_epochs", train.max_epochs);
  read_if(obj, "patience", train.patience);
  read_if(obj, "eval_every", train.eval_every);
  read_if(obj, "rng_seed", train.rng_seed);
  read_if(obj, "use_augmentation", train.use_augmentation);
}

void parse_eval(const json& obj, EvalConfig& eval) {
  reject_unknown_keys(obj, "eval", {"similarity", "csls_k", "hits_ks", "tile_rows"});
  if (auto it = obj.find("similarity"); it != obj.end()) {
    eval.similarity = similarity_from_name(it->get<std::string>());
  }
  read_if(obj, "csls_k", eval.csls_k);
  read_if(obj, "hits_ks", eval.hits_ks);
  read_if(obj, "tile_rows", eval.tile_rows);
  eval.validate();
}

void parse_synthetic(const json& obj, SyntheticConfig& synth) {
  reject_unknown_keys(obj, "synthetic",
                      {"num_entities_per_side", "num_relations", "avg_degree",
                       "rewire_fraction", "seed_alignment_fraction", "rng_seed"});
  read_if(obj, "num_entities_per_side", synth.num_entities_per_side);
  read_if(obj, "num_relations", synth.num_relations);
  read_if(obj, "avg_degree", synth.avg_degree);
  read_if(obj, "rewire_fraction", synth.rewire_fraction);
  read_if(obj, "seed_alignment_fraction", synth.seed_alignment_fraction);
  read_if(obj, "rng_seed", synth.rng_seed);
}

void parse_dataset(const json& obj, RunConfig& cfg) {
  reject_unknown_keys(obj, "dataset",
                      {"triples1", "triples2", "links", "train_fraction", "split_seed"});
  DatasetPaths d;
  for (const char* key : {"triples1", "triples2", "links"}) {
    if (!obj.contains(key)) {
      throw ConfigError(std::string("config: dataset requires '") + key + "'");
    }
  }
  read_if(obj, "triples1", d.triples1);
  read_if(obj, "triples2", d.triples2);
  read_if(obj, "links", d.links);
  read_if(obj, "train_fraction", d.train_fraction);
  read_if(obj, "split_seed", d.split_seed);
  if (!(d.train_fraction > 0.0 && d.train_fraction < 1.0)) {
    throw ConfigError("config: dataset.train_fraction must be in (0,1)");
  }
  cfg.dataset = std::move(d);
}

void parse_gradcheck(const json& obj, GradcheckConfig& gc) {
  reject_unknown_keys(obj, "gradcheck",
                      {"entities_per_side", "num_relations_per_side", "layer_dims",
                       "hops", "variant", "step", "tolerance", "rng_seed",
                       "debug_grad_scale"});
  read_if(obj, "entities_per_side", gc.entities_per_side);
  read_if(obj, "num_relations_per_side", gc.num_relations_per_side);
  read_if(obj, "layer_dims", gc.layer_dims);
  read_if(obj, "hops", gc.hops);
  if (auto it = obj.find("variant"); it != obj.end()) {
    gc.variant = variant_from_name(it->get<std::string>());
  }
  read_if(obj, "step", gc.step);
  read_if(obj, "tolerance", gc.tolerance);
  read_if(obj, "rng_seed", gc.rng_seed);
  read_if(obj, "debug_grad_scale", gc.debug_grad_scale);
  gc.validate();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(root, "",
                      {"dataset", "synthetic", "model", "loss", "train", "eval",
                       "gradcheck", "validation_fraction", "output_dir"});

  RunConfig cfg;
  if (root.contains("dataset")) parse_dataset(root.at("dataset"), cfg);
  if (root.contains("synthetic")) parse_synthetic(root.at("synthetic"), cfg.synthetic);
  if (root.contains("model")) parse_model(root.at("model"), cfg.train.model);
  if (root.contains("loss")) parse_loss(root.at("loss"), cfg.train.loss);
  if (root.contains("train")) parse_train(root.at("train"), cfg.train);
  if (root.contains("eval")) parse_eval(root.at("eval"), cfg.eval);
  if (root.contains("gradcheck")) parse_gradcheck(root.at("gradcheck"), cfg.gradcheck);
  read_if(root, "validation_fraction", cfg.validation_fraction);
  read_if(root, "output_dir", cfg.output_dir);
  if (cfg.validation_fraction < 0.0 || cfg.validation_fraction >= 1.0) {
    throw ConfigError("config: validation_fraction must be in [0,1)");
  }
  cfg.train.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  json root;
  if (cfg.dataset) {
    root["dataset"] = {{"triples1", cfg.dataset->triples1},
                       {"triples2", cfg.dataset->triples2},
                       {"links", cfg.dataset->links},
                       {"train_fraction", cfg.dataset->train_fraction},
                       {"split_seed", cfg.dataset->split_seed}};
  }
  root["synthetic"] = {{"num_entities_per_side", cfg.synthetic.num_entities_per_side},
                       {"num_relations", cfg.synthetic.num_relations},
                       {"avg_degree", cfg.synthetic.avg_degree},
                       {"rewire_fraction", cfg.synthetic.rewire_fraction},
                       {"seed_alignment_fraction", cfg.synthetic.seed_alignment_fraction},
                       {"rng_seed", cfg.synthetic.rng_seed}};
  const ModelConfig& m = cfg.train.model;
  root["model"] = {{"layer_dims", m.layer_dims},
                   {"hops", m.hops},
                   {"variant", variant_name(m.variant)},
                   {"gate_activation", act_name(m.gate_activation)},
                   {"aggregation_activation", act_name(m.aggregation_activation)},
                   {"leaky_slope", m.leaky_slope}};
  const LossConfig& l = cfg.train.loss;
  root["loss"] = {{"margin", l.margin},
                  {"alpha1", l.alpha1},
                  {"alpha2", l.alpha2},
                  {"negatives_per_pair", l.negatives_per_pair}};
  root["train"] = {{"learning_rate", cfg.train.learning_rate},
                   {"batch_size", cfg.train.batch_size},
                   {"max_epochs", cfg.train.max_epochs},
                   {"patience", cfg.train.patience},
                   {"eval_every", cfg.train.eval_every},
                   {"rng_seed", cfg.train.rng_seed},
                   {"use_augmentation", cfg.train.use_augmentation}};
  root["eval"] = {{"similarity", similarity_name(cfg.eval.similarity)},
                  {"csls_k", cfg.eval.csls_k},
                  {"hits_ks", cfg.eval.hits_ks},
                  {"tile_rows", cfg.eval.tile_rows}};
  root["validation_fraction"] = cfg.validation_fraction;
  root["output_dir"] = cfg.output_dir;
  return root.dump(2);
}

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData data;
  AlignmentSet seed_full;
  if (cfg.dataset) {
    auto [pair, links] =
        load_graph_pair(cfg.dataset->triples1, cfg.dataset->triples2, cfg.dataset->links);
    data.pair = std::move(pair);
    std::tie(seed_full, data.test) =
        split_alignment(links, cfg.dataset->train_fraction, cfg.dataset->split_seed);
  } else {
    auto [pair, seed, test] = generate_synthetic_pair(cfg.synthetic);
    data.pair = std::move(pair);
    seed_full = std::move(seed);
    data.test = std::move(test);
  }
  std::tie(data.seed, data.validation) =
      carve_validation(seed_full, cfg.validation_fraction, cfg.train.rng_seed);
  data.reference.pairs = data.seed.pairs;
  data.reference.pairs.insert(data.reference.pairs.end(), data.validation.pairs.begin(),
                              data.validation.pairs.end());
  data.reference.pairs.insert(data.reference.pairs.end(), data.test.pairs.begin(),
                              data.test.pairs.end());
  return data;
}

}  // namespace alinet
