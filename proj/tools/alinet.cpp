#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "alinet/errors.hpp"
#include "alinet/evaluator.hpp"
#include "alinet/gradcheck.hpp"
#include "alinet/run_config.hpp"
#include "alinet/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace alinet;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitVerification = 4;

nlohmann::json report_to_json(const EvalReport& report, const std::string& label,
                              Similarity similarity) {
  nlohmann::json hits;
  for (const auto& [k, v] : report.hits) hits[std::to_string(k)] = v;
  return {{"label", label},
          {"similarity", similarity_name(similarity)},
          {"hits", hits},
          {"mrr", report.mrr},
          {"num_test_pairs", report.num_test_pairs},
          {"mean_overlap_coefficient", report.mean_overlap_coefficient}};
}

void print_report_table(const std::vector<std::pair<std::string, EvalReport>>& reports,
                        const std::vector<int>& hits_ks) {
  std::printf("%-10s", "layer");
  for (int k : hits_ks) std::printf("  Hits@%-4d", k);
  std::printf("  %-8s  %-10s  %s\n", "MRR", "pairs", "mean_OC");
  for (const auto& [label, r] : reports) {
    std::printf("%-10s", label.c_str());
    for (int k : hits_ks) std::printf("  %-9.4f", r.hits_at(k));
    std::printf("  %-8.4f  %-10d  %.4f\n", r.mrr, r.num_test_pairs,
                r.mean_overlap_coefficient);
  }
}

// Same graph view the trainer saw: augmentation uses training seed only.
KnowledgeGraphPair training_graph(const PreparedData& data, const RunConfig& cfg) {
  return cfg.train.use_augmentation ? augment_neighborhood(data.pair, data.seed)
                                    : data.pair;
}

int cmd_train(const RunConfig& cfg) {
  PreparedData data = prepare_data(cfg);
  TrainResult result = train(data.pair, data.seed, data.validation, cfg.train);

  fs::create_directories(cfg.output_dir);
  const std::string ckpt_path = cfg.output_dir + "/checkpoint.ckpt";
  const std::string history_path = cfg.output_dir + "/history.tsv";
  const std::string report_path = cfg.output_dir + "/report.json";
  save_checkpoint(ckpt_path, result.params, cfg.train.model);
  write_history_tsv(history_path, result.history);

  nlohmann::json report_json;
  if (!data.test.empty()) {
    const KnowledgeGraphPair graph = training_graph(data, cfg);
    const NeighborStructure structure =
        build_neighbor_structure(graph, std::max(2, cfg.train.model.hops));
    ForwardTrace trace = forward(result.params, structure, cfg.train.model);
    EvalReport report =
        evaluate(trace.final, data.test, cfg.eval, &structure, &data.reference);
    report_json = report_to_json(report, "combined", cfg.eval.similarity);
    print_report_table({{"combined", report}}, cfg.eval.hits_ks);
  } else {
    report_json = {{"label", "combined"}, {"num_test_pairs", 0}};
    std::printf("no test pairs; skipping final evaluation\n");
  }
  std::ofstream(report_path) << report_json.dump(2) << '\n';

  std::printf("trained %zu epochs (best epoch %d, val Hits@1 %.4f)\n",
              result.history.epochs.size(), result.history.best_epoch,
              result.history.best_val_hits1);
  std::printf("wrote %s, %s, %s\n", ckpt_path.c_str(), history_path.c_str(),
              report_path.c_str());
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path,
                 bool per_layer, const std::string& dump_predictions) {
  PreparedData data = prepare_data(cfg);
  auto [params, ckpt_model] = load_checkpoint(checkpoint_path);
  if (ckpt_model.layer_dims != cfg.train.model.layer_dims) {
    throw ConfigError("evaluate: checkpoint layer_dims do not match the config");
  }
  if (ckpt_model.variant != cfg.train.model.variant ||
      ckpt_model.hops != cfg.train.model.hops) {
    throw ConfigError("evaluate: checkpoint variant/hops do not match the config");
  }
  const KnowledgeGraphPair graph = training_graph(data, cfg);
  if (params.input_features.rows != graph.num_entities) {
    throw ConfigError("evaluate: checkpoint entity count " +
                      std::to_string(params.input_features.rows) +
                      " does not match the dataset (" +
                      std::to_string(graph.num_entities) + ")");
  }
  if (data.test.empty()) throw ConfigError("evaluate: no test pairs");

  const NeighborStructure structure =
      build_neighbor_structure(graph, std::max(2, ckpt_model.hops));
  ForwardTrace trace = forward(params, structure, ckpt_model);

  std::vector<std::pair<std::string, EvalReport>> reports;
  if (per_layer) {
    reports = evaluate_layers(trace, params.input_features, data.test, cfg.eval);
  } else {
    reports.emplace_back("combined", evaluate(trace.final, data.test, cfg.eval,
                                              &structure, &data.reference));
  }
  print_report_table(reports, cfg.eval.hits_ks);

  fs::create_directories(cfg.output_dir);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [label, r] : reports) {
    out.push_back(report_to_json(r, label, cfg.eval.similarity));
  }
  const std::string report_path = cfg.output_dir + "/report.json";
  std::ofstream(report_path) << out.dump(2) << '\n';
  std::printf("wrote %s\n", report_path.c_str());

  if (!dump_predictions.empty()) {
    std::vector<int> sources, targets;
    for (const auto& [s, t] : data.test.pairs) {
      sources.push_back(s);
      targets.push_back(t);
    }
    Ranking ranking = predict_alignment(trace.final, sources, targets, cfg.eval);
    std::ofstream tsv(dump_predictions);
    for (std::size_t i = 0; i < ranking.sources.size(); ++i) {
      tsv << graph.entity_names[ranking.sources[i]];
      const auto& list = ranking.ranked[i];
      for (std::size_t r = 0; r < list.size() && r < 10; ++r) {
        tsv << '\t' << graph.entity_names[list[r]];
      }
      tsv << '\n';
    }
    std::printf("wrote %s\n", dump_predictions.c_str());
  }
  return kExitOk;
}

int cmd_generate(const RunConfig& cfg) {
  auto [pair, seed, test] = generate_synthetic_pair(cfg.synthetic);
  fs::create_directories(cfg.output_dir);
  write_triples_tsv(pair, 1, cfg.output_dir + "/triples_1.tsv");
  write_triples_tsv(pair, 2, cfg.output_dir + "/triples_2.tsv");
  AlignmentSet all;
  all.pairs = seed.pairs;
  all.pairs.insert(all.pairs.end(), test.pairs.begin(), test.pairs.end());
  std::sort(all.pairs.begin(), all.pairs.end());
  write_links_tsv(pair, all, cfg.output_dir + "/links.tsv");
  write_links_tsv(pair, seed, cfg.output_dir + "/links_train.tsv");
  write_links_tsv(pair, test, cfg.output_dir + "/links_test.tsv");
  std::printf("wrote %d entities/side, %zu triples, %zu links to %s\n",
              cfg.synthetic.num_entities_per_side, pair.triples.size(),
              all.pairs.size(), cfg.output_dir.c_str());
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg) {
  GradcheckResult result = run_gradcheck(cfg.gradcheck);
  for (const auto& t : result.tensors) {
    std::printf("%-16s max relative error %.3e\n", t.name.c_str(), t.max_rel_error);
  }
  std::printf("overall max relative error %.3e (tolerance %.1e)\n",
              result.max_rel_error, cfg.gradcheck.tolerance);
  if (!result.passed(cfg.gradcheck.tolerance)) {
    std::fprintf(stderr, "gradcheck FAILED on tensor '%s'\n",
                 result.worst_tensor.c_str());
    return kExitVerification;
  }
  std::printf("gradcheck passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AliNet entity-alignment toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string out_dir;
  std::string similarity;
  std::string dump_predictions;
  bool per_layer = false;

  auto add_common = [&](CLI::App* sub, bool need_checkpoint = false) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    if (need_checkpoint) {
      sub->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    }
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  add_common(train_cmd);
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint");
  add_common(eval_cmd, true);
  eval_cmd->add_option("--similarity", similarity,
                       "euclidean | cosine | csls (overrides config)");
  eval_cmd->add_flag("--per-layer", per_layer, "report every layer separately");
  eval_cmd->add_option("--dump-predictions", dump_predictions,
                       "write top-10 ranked candidates to this TSV file");
  CLI::App* gen_cmd = app.add_subcommand("generate", "write a synthetic benchmark");
  add_common(gen_cmd);
  CLI::App* grad_cmd = app.add_subcommand("gradcheck",
                                          "verify gradients against finite differences");
  add_common(grad_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!similarity.empty()) cfg.eval.similarity = similarity_from_name(similarity);

    if (train_cmd->parsed()) return cmd_train(cfg);
    if (eval_cmd->parsed()) {
      return cmd_evaluate(cfg, checkpoint_path, per_layer, dump_predictions);
    }
    if (gen_cmd->parsed()) return cmd_generate(cfg);
    if (grad_cmd->parsed()) return cmd_gradcheck(cfg);
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
