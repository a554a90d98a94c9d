#include "alinet/gradcheck.hpp"

#include "alinet/errors.hpp"
#include "alinet/numerics.hpp"

namespace alinet {

void GradcheckConfig::validate() const {
  if (entities_per_side < 2) throw ConfigError("gradcheck: need >= 2 entities per side");
  if (num_relations_per_side < 1) throw ConfigError("gradcheck: need >= 1 relation");
  if (step <= 0.0) throw ConfigError("gradcheck: step must be positive");
  if (tolerance <= 0.0) throw ConfigError("gradcheck: tolerance must be positive");
}

GradcheckResult run_gradcheck(const GradcheckConfig& cfg) {
  cfg.validate();

  SyntheticConfig synth;
  synth.num_entities_per_side = cfg.entities_per_side;
  synth.num_relations = cfg.num_relations_per_side;
  synth.avg_degree = 2.2;
  synth.rewire_fraction = 0.25;  // make the two sides differ a little
  synth.seed_alignment_fraction = 0.6;
  synth.rng_seed = cfg.rng_seed;
  auto [pair, seed, test] = generate_synthetic_pair(synth);

  ModelConfig model;
  model.layer_dims = cfg.layer_dims;
  model.hops = cfg.hops;
  model.variant = cfg.variant;
  model.validate();

  const NeighborStructure structure =
      build_neighbor_structure(pair, std::max(2, model.hops));
  const RelationIndex rel_index = build_relation_index(pair);
  LossConfig loss_cfg;  // stock hyperparameters

  Rng rng(cfg.rng_seed + 1);
  ParameterSet params = init_parameters(model, pair.num_entities, rng);
  NegativeSet negatives =
      sample_negatives(seed, pair, loss_cfg.negatives_per_pair, rng);

  auto loss_value = [&]() {
    ForwardTrace trace = forward(params, structure, model);
    return total_loss(trace.final, seed, negatives, rel_index, loss_cfg).total;
  };

  ForwardTrace trace = forward(params, structure, model);
  LossResult loss = total_loss(trace.final, seed, negatives, rel_index, loss_cfg);
  ParameterSet analytic = backward(trace, structure, params, loss.grad);
  if (cfg.debug_grad_scale != 1.0) {
    analytic.for_each_tensor([&](const std::string&, Matrix& m) {
      scale_inplace(m, cfg.debug_grad_scale);
    });
  }

  GradcheckResult result;
  std::vector<std::pair<std::string, Matrix*>> grad_list;
  analytic.for_each_tensor([&](const std::string& name, Matrix& m) {
    grad_list.emplace_back(name, &m);
  });
  std::size_t idx = 0;
  params.for_each_tensor([&](const std::string& name, Matrix& tensor) {
    const Matrix& grad = *grad_list[idx++].second;
    const double err = finite_diff_check(loss_value, tensor, grad, cfg.step);
    result.tensors.push_back({name, err});
    if (err >= result.max_rel_error) {
      // >= so the worst tensor is always named, even when all errors are 0
      result.max_rel_error = err;
      result.worst_tensor = name;
    }
  });
  return result;
}

}  // namespace alinet
