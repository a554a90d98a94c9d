#include "alinet/model.hpp"

#include <algorithm>
#include <cmath>

#include "alinet/errors.hpp"

namespace alinet {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::alinet: return "alinet";
    case Variant::gcn_only: return "gcn_only";
    case Variant::mix: return "mix";
    case Variant::add: return "add";
    case Variant::gat_shared: return "gat_shared";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "alinet") return Variant::alinet;
  if (name == "gcn_only") return Variant::gcn_only;
  if (name == "mix") return Variant::mix;
  if (name == "add") return Variant::add;
  if (name == "gat_shared") return Variant::gat_shared;
  throw ConfigError("unknown model variant '" + name + "'");
}

int ModelConfig::combined_dim() const {
  int d = 0;
  for (std::size_t l = 1; l < layer_dims.size(); ++l) d += layer_dims[l];
  return d;
}

void ModelConfig::validate() const {
  if (layer_dims.size() < 2) throw ConfigError("model: need at least one layer");
  for (int d : layer_dims) {
    if (d < 1) throw ConfigError("model: layer dimensions must be >= 1");
  }
  if (hops < 1) throw ConfigError("model: hops must be >= 1");
  if (gate_activation != Act::relu && gate_activation != Act::sigmoid) {
    throw ConfigError("model: gate activation must be relu or sigmoid");
  }
  if (aggregation_activation != Act::tanh && aggregation_activation != Act::relu) {
    throw ConfigError("model: aggregation activation must be tanh or relu");
  }
  if (leaky_slope <= 0.0 || leaky_slope >= 1.0) {
    throw ConfigError("model: leaky_slope must be in (0,1)");
  }
}

bool ModelConfig::uses_attention() const {
  if (hops < 2) return false;
  return variant == Variant::alinet || variant == Variant::add ||
         variant == Variant::gat_shared;
}

void ParameterSet::for_each_tensor(
    const std::function<void(const std::string&, Matrix&)>& fn) {
  fn("H0", input_features);
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const std::string prefix = "layer" + std::to_string(li + 1);
    LayerParams& lp = layers[li];
    fn(prefix + "_W", lp.weight);
    for (std::size_t h = 0; h < lp.hop_weights.size(); ++h) {
      const std::string hop = prefix + "_hop" + std::to_string(h + 2);
      fn(hop + "_W", lp.hop_weights[h]);
      fn(hop + "_M1", lp.attn_self[h]);
      if (h < lp.attn_neighbor.size()) fn(hop + "_M2", lp.attn_neighbor[h]);
    }
    for (std::size_t g = 0; g < lp.gate_weight.size(); ++g) {
      const std::string gate = prefix + "_gate" + std::to_string(g + 1);
      fn(gate + "_M", lp.gate_weight[g]);
      fn(gate + "_b", lp.gate_bias[g]);
    }
  }
}

void ParameterSet::for_each_tensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
  const_cast<ParameterSet*>(this)->for_each_tensor(
      [&](const std::string& name, Matrix& m) { fn(name, m); });
}

std::vector<Matrix*> ParameterSet::tensor_ptrs() {
  std::vector<Matrix*> out;
  for_each_tensor([&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> ParameterSet::tensor_ptrs() const {
  std::vector<const Matrix*> out;
  for_each_tensor([&](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

ParameterSet init_parameters(const ModelConfig& config, int num_entities, Rng& rng) {
  config.validate();
  if (num_entities < 1) throw ConfigError("init_parameters: no entities");
  ParameterSet p;
  p.input_features = xavier_init(num_entities, config.layer_dims[0], rng);
  p.layers.resize(config.num_layers());
  for (int l = 1; l <= config.num_layers(); ++l) {
    const int d_in = config.layer_dims[l - 1];
    const int d_out = config.layer_dims[l];
    auto& lp = p.layers[l - 1];
    lp.weight = xavier_init(d_in, d_out, rng);
    if (config.uses_attention()) {
      for (int m = 2; m <= config.hops; ++m) {
        lp.hop_weights.push_back(xavier_init(d_in, d_out, rng));
        lp.attn_self.push_back(xavier_init(d_out, d_in, rng));
        if (config.variant != Variant::gat_shared) {
          lp.attn_neighbor.push_back(xavier_init(d_out, d_in, rng));
        }
      }
    }
    if (config.uses_gates()) {
      for (int s = 1; s < config.hops; ++s) {
        lp.gate_weight.push_back(xavier_init(d_out, d_out, rng));
        lp.gate_bias.push_back(xavier_init(1, d_out, rng));
      }
    }
  }
  return p;
}

ParameterSet zeros_like(const ParameterSet& params) {
  ParameterSet z = params;
  z.for_each_tensor([](const std::string&, Matrix& m) {
    std::fill(m.data.begin(), m.data.end(), 0.0);
  });
  return z;
}

Matrix one_hop_aggregate(const Matrix& h_prev, const SparseMatrix& adj_norm,
                         const Matrix& weight, Act act, double slope) {
  return apply_activation(spmm(adj_norm, matmul(h_prev, weight)), act, slope);
}

namespace {

// Attention pieces shared by the public op and the traced forward pass.
struct AttentionParts {
  Matrix self_proj;      // X * M1^T
  Matrix neighbor_proj;  // X * M2^T (empty when shared)
  SparseMatrix scores;   // LeakyReLU'd, on the mask pattern
  SparseMatrix alpha;
};

AttentionParts compute_attention(const Matrix& h_in, const Matrix& attn_self,
                                 const Matrix& attn_neighbor,
                                 const SparseMatrix& mask, double leaky_slope) {
  const bool shared = &attn_self == &attn_neighbor;
  AttentionParts parts;
  parts.self_proj = matmul_nt(h_in, attn_self);
  if (!shared) parts.neighbor_proj = matmul_nt(h_in, attn_neighbor);
  const Matrix& q = shared ? parts.self_proj : parts.neighbor_proj;

  parts.scores = mask;
  const int dim = parts.self_proj.cols;
  for (int i = 0; i < mask.rows; ++i) {
    const double* pi = parts.self_proj.row(i);
    for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
      const double* qj = q.row(mask.col_idx[k]);
      double s = 0.0;
      for (int d = 0; d < dim; ++d) s += pi[d] * qj[d];
      parts.scores.values[k] = s > 0.0 ? s : leaky_slope * s;
    }
  }
  parts.alpha = masked_row_softmax(parts.scores);
  return parts;
}

}  // namespace

SparseMatrix attention_weights(const Matrix& h_in, const Matrix& attn_self,
                               const Matrix& attn_neighbor, const SparseMatrix& mask,
                               double leaky_slope) {
  return compute_attention(h_in, attn_self, attn_neighbor, mask, leaky_slope).alpha;
}

Matrix two_hop_aggregate(const Matrix& h_prev, const SparseMatrix& alpha,
                         const Matrix& weight, Act act, double slope) {
  return apply_activation(spmm(alpha, matmul(h_prev, weight)), act, slope);
}

std::pair<Matrix, Matrix> gate_combine(const Matrix& h1, const Matrix& h2,
                                       const Matrix& gate_weight,
                                       const Matrix& gate_bias, Act gate_act) {
  if (!h1.same_shape(h2)) throw ShapeError("gate_combine: stream shape mismatch");
  Matrix pre = matmul_nt(h2, gate_weight);
  for (int i = 0; i < pre.rows; ++i) {
    double* row = pre.row(i);
    for (int j = 0; j < pre.cols; ++j) row[j] += gate_bias(0, j);
  }
  Matrix g = apply_activation(pre, gate_act);
  Matrix h(h1.rows, h1.cols);
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    h.data[i] = g.data[i] * h1.data[i] + (1.0 - g.data[i]) * h2.data[i];
  }
  return {std::move(h), std::move(g)};
}

namespace {

void check_compatible(const ParameterSet& params, const NeighborStructure& structure,
                      const ModelConfig& config) {
  config.validate();
  if (params.input_features.rows != structure.num_entities) {
    throw ConfigError("forward: parameter/structure entity count mismatch");
  }
  if (params.input_features.cols != config.layer_dims[0]) {
    throw ConfigError("forward: input feature dimension mismatch");
  }
  if (static_cast<int>(params.layers.size()) != config.num_layers()) {
    throw ConfigError("forward: layer count mismatch");
  }
  const int needed_hop = (config.uses_attention() || config.variant == Variant::mix)
                             ? config.hops
                             : 1;
  if (structure.max_hop < needed_hop) {
    throw ConfigError("forward: structure built for fewer hops than the model uses");
  }
  for (int l = 1; l <= config.num_layers(); ++l) {
    const auto& lp = params.layers[l - 1];
    const int d_in = config.layer_dims[l - 1];
    const int d_out = config.layer_dims[l];
    if (lp.weight.rows != d_in || lp.weight.cols != d_out) {
      throw ConfigError("forward: weight shape mismatch at layer " + std::to_string(l));
    }
    const std::size_t hop_count = config.uses_attention() ? config.hops - 1 : 0;
    if (lp.hop_weights.size() != hop_count || lp.attn_self.size() != hop_count) {
      throw ConfigError("forward: hop tensor count mismatch at layer " +
                        std::to_string(l));
    }
    const std::size_t gate_count = config.uses_gates() ? config.hops - 1 : 0;
    if (lp.gate_weight.size() != gate_count || lp.gate_bias.size() != gate_count) {
      throw ConfigError("forward: gate tensor count mismatch at layer " +
                        std::to_string(l));
    }
  }
}

}  // namespace

ForwardTrace forward(const ParameterSet& params, const NeighborStructure& structure,
                     const ModelConfig& config) {
  check_compatible(params, structure, config);
  const int num_layers = config.num_layers();
  const Act agg = config.aggregation_activation;
  const bool shared = config.variant == Variant::gat_shared;

  SparseMatrix mix_adj;
  if (config.variant == Variant::mix) {
    mix_adj = structure.union_adjacency(config.hops);
  }
  const SparseMatrix& one_hop_adj =
      config.variant == Variant::mix ? mix_adj : structure.adj_norm;

  ForwardTrace trace;
  trace.config = config;
  trace.layers.resize(num_layers);
  int total_dim = config.combined_dim();
  trace.final = Matrix(structure.num_entities, total_dim);

  int col_offset = 0;
  for (int l = 1; l <= num_layers; ++l) {
    auto& lt = trace.layers[l - 1];
    const auto& lp = params.layers[l - 1];
    lt.input = (l == 1) ? params.input_features : trace.layers[l - 2].output;

    lt.one_hop_hidden = one_hop_aggregate(lt.input, one_hop_adj, lp.weight, agg);

    if (config.uses_attention()) {
      for (int m = 2; m <= config.hops; ++m) {
        const Matrix& m1 = lp.attn_self[m - 2];
        const Matrix& m2 = shared ? lp.attn_self[m - 2] : lp.attn_neighbor[m - 2];
        auto parts = compute_attention(lt.input, m1, m2, structure.hop_mask(m),
                                       config.leaky_slope);
        ForwardTrace::HopTrace ht;
        ht.attn_self_proj = std::move(parts.self_proj);
        ht.attn_neighbor_proj = std::move(parts.neighbor_proj);
        ht.scores = std::move(parts.scores);
        ht.alpha = std::move(parts.alpha);
        ht.transformed = matmul(lt.input, lp.hop_weights[m - 2]);
        ht.hidden = apply_activation(spmm(ht.alpha, ht.transformed), agg);
        lt.hop.push_back(std::move(ht));
      }
    }

    if (config.uses_gates()) {
      Matrix combined = lt.one_hop_hidden;
      for (int m = 2; m <= config.hops; ++m) {
        auto [next, g] =
            gate_combine(combined, lt.hop[m - 2].hidden, lp.gate_weight[m - 2],
                         lp.gate_bias[m - 2], config.gate_activation);
        lt.gate.push_back(std::move(g));
        lt.combined.push_back(next);
        combined = std::move(next);
      }
      lt.output = std::move(combined);
    } else if (config.variant == Variant::add && config.uses_attention()) {
      Matrix sum = lt.one_hop_hidden;
      for (const auto& ht : lt.hop) add_inplace(sum, ht.hidden);
      lt.output = std::move(sum);
    } else {
      lt.output = lt.one_hop_hidden;
    }

    lt.norms = row_norms(lt.output);
    lt.normalized = l2_normalize_rows(lt.output);
    for (int i = 0; i < lt.normalized.rows; ++i) {
      const double* src = lt.normalized.row(i);
      double* dst = trace.final.row(i) + col_offset;
      std::copy(src, src + lt.normalized.cols, dst);
    }
    col_offset += lt.normalized.cols;
  }
  return trace;
}

namespace {

// Gradient pieces flowing through one attentive hop. Accumulates parameter
// gradients and returns the contribution to dX.
void backward_hop(const ForwardTrace::LayerTrace& lt, int hop_index,
                  const ParameterSet::LayerParams& lp, const Matrix& d_hidden,
                  const ModelConfig& config, ParameterSet::LayerParams& grads,
                  Matrix& d_input) {
  const auto& ht = lt.hop[hop_index];
  const bool shared = config.variant == Variant::gat_shared;
  const Matrix& m1 = lp.attn_self[hop_index];
  const Matrix& m2 = shared ? lp.attn_self[hop_index] : lp.attn_neighbor[hop_index];
  const Matrix& q_proj = shared ? ht.attn_self_proj : ht.attn_neighbor_proj;

  // through the aggregation activation
  Matrix dz = hadamard(
      d_hidden, activation_grad_from_output(ht.hidden, config.aggregation_activation));

  // z = alpha * transformed
  SparseMatrix dalpha = ht.alpha;
  const int dim_out = ht.transformed.cols;
  for (int i = 0; i < ht.alpha.rows; ++i) {
    const double* dzi = dz.row(i);
    for (int k = ht.alpha.row_begin(i); k < ht.alpha.row_end(i); ++k) {
      const double* yj = ht.transformed.row(ht.alpha.col_idx[k]);
      double acc = 0.0;
      for (int d = 0; d < dim_out; ++d) acc += dzi[d] * yj[d];
      dalpha.values[k] = acc;
    }
  }
  Matrix dy = spmm_tn(ht.alpha, dz);
  add_inplace(grads.hop_weights[hop_index], matmul_tn(lt.input, dy));
  add_inplace(d_input, matmul_nt(dy, lp.hop_weights[hop_index]));

  // softmax, LeakyReLU, then the bilinear score s_ij = <P_i, Q_j>
  SparseMatrix dscores = masked_row_softmax_backward(ht.alpha, dalpha);
  for (std::size_t k = 0; k < dscores.values.size(); ++k) {
    dscores.values[k] *= activation_grad_from_output(ht.scores.values[k],
                                                     Act::leaky_relu,
                                                     config.leaky_slope);
  }
  const int dim_attn = ht.attn_self_proj.cols;
  Matrix dp(ht.attn_self_proj.rows, dim_attn);
  Matrix dq(ht.attn_self_proj.rows, dim_attn);
  for (int i = 0; i < dscores.rows; ++i) {
    double* dpi = dp.row(i);
    const double* pi = ht.attn_self_proj.row(i);
    for (int k = dscores.row_begin(i); k < dscores.row_end(i); ++k) {
      const int j = dscores.col_idx[k];
      const double ds = dscores.values[k];
      if (ds == 0.0) continue;
      const double* qj = q_proj.row(j);
      double* dqj = dq.row(j);
      for (int d = 0; d < dim_attn; ++d) {
        dpi[d] += ds * qj[d];
        dqj[d] += ds * pi[d];
      }
    }
  }
  add_inplace(grads.attn_self[hop_index], matmul_tn(dp, lt.input));
  add_inplace(d_input, matmul(dp, m1));
  if (shared) {
    add_inplace(grads.attn_self[hop_index], matmul_tn(dq, lt.input));
  } else {
    add_inplace(grads.attn_neighbor[hop_index], matmul_tn(dq, lt.input));
  }
  add_inplace(d_input, matmul(dq, m2));
}

void backward_one_hop(const ForwardTrace::LayerTrace& lt, const SparseMatrix& adj,
                      const ParameterSet::LayerParams& lp, const Matrix& d_hidden,
                      const ModelConfig& config, ParameterSet::LayerParams& grads,
                      Matrix& d_input) {
  Matrix dz = hadamard(d_hidden, activation_grad_from_output(
                                     lt.one_hop_hidden, config.aggregation_activation));
  Matrix dy = spmm_tn(adj, dz);
  add_inplace(grads.weight, matmul_tn(lt.input, dy));
  add_inplace(d_input, matmul_nt(dy, lp.weight));
}

}  // namespace

ParameterSet backward(const ForwardTrace& trace, const NeighborStructure& structure,
                      const ParameterSet& params, const Matrix& d_final,
                      const std::vector<Matrix>* d_layer_outputs) {
  const ModelConfig& config = trace.config;
  check_compatible(params, structure, config);
  const int num_layers = config.num_layers();
  if (d_final.rows != trace.final.rows || d_final.cols != trace.final.cols) {
    throw ShapeError("backward: d_final shape mismatch");
  }
  if (d_layer_outputs && static_cast<int>(d_layer_outputs->size()) != num_layers) {
    throw ConfigError("backward: per-layer gradient count mismatch");
  }

  SparseMatrix mix_adj;
  if (config.variant == Variant::mix) {
    mix_adj = structure.union_adjacency(config.hops);
  }
  const SparseMatrix& one_hop_adj =
      config.variant == Variant::mix ? mix_adj : structure.adj_norm;

  ParameterSet grads = zeros_like(params);

  // Gradient w.r.t. each layer's combined output: the concatenation slice
  // pulled back through the row normalization, plus any direct per-layer
  // contribution.
  std::vector<Matrix> d_output(num_layers);
  int col_offset = 0;
  for (int l = 1; l <= num_layers; ++l) {
    const auto& lt = trace.layers[l - 1];
    Matrix dnorm(lt.normalized.rows, lt.normalized.cols);
    for (int i = 0; i < dnorm.rows; ++i) {
      const double* src = d_final.row(i) + col_offset;
      std::copy(src, src + dnorm.cols, dnorm.row(i));
    }
    col_offset += dnorm.cols;
    d_output[l - 1] = l2_normalize_rows_backward(lt.normalized, lt.norms, dnorm);
    if (d_layer_outputs) add_inplace(d_output[l - 1], (*d_layer_outputs)[l - 1]);
  }

  for (int l = num_layers; l >= 1; --l) {
    const auto& lt = trace.layers[l - 1];
    const auto& lp = params.layers[l - 1];
    auto& lg = grads.layers[l - 1];
    Matrix d_input(lt.input.rows, lt.input.cols);
    Matrix d_combined = std::move(d_output[l - 1]);

    if (config.uses_gates()) {
      // unwind the fold: combined_m = g . combined_{m-1} + (1-g) . hop_m
      for (int m = config.hops; m >= 2; --m) {
        const Matrix& g = lt.gate[m - 2];
        const Matrix& hop_hidden = lt.hop[m - 2].hidden;
        const Matrix& prev =
            (m == 2) ? lt.one_hop_hidden : lt.combined[m - 3];
        Matrix d_gate(g.rows, g.cols);
        Matrix d_hop(g.rows, g.cols);
        Matrix d_prev(g.rows, g.cols);
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double dc = d_combined.data[i];
          d_gate.data[i] = dc * (prev.data[i] - hop_hidden.data[i]);
          d_prev.data[i] = dc * g.data[i];
          d_hop.data[i] = dc * (1.0 - g.data[i]);
        }
        Matrix d_pre = hadamard(
            d_gate, activation_grad_from_output(g, config.gate_activation));
        add_inplace(lg.gate_weight[m - 2], matmul_tn(d_pre, hop_hidden));
        add_inplace(lg.gate_bias[m - 2], column_sums(d_pre));
        add_inplace(d_hop, matmul(d_pre, lp.gate_weight[m - 2]));
        backward_hop(lt, m - 2, lp, d_hop, config, lg, d_input);
        d_combined = std::move(d_prev);
      }
      backward_one_hop(lt, one_hop_adj, lp, d_combined, config, lg, d_input);
    } else if (config.variant == Variant::add && config.uses_attention()) {
      for (int m = config.hops; m >= 2; --m) {
        backward_hop(lt, m - 2, lp, d_combined, config, lg, d_input);
      }
      backward_one_hop(lt, one_hop_adj, lp, d_combined, config, lg, d_input);
    } else {
      backward_one_hop(lt, one_hop_adj, lp, d_combined, config, lg, d_input);
    }

    if (l > 1) {
      add_inplace(d_output[l - 2], d_input);
    } else {
      add_inplace(grads.input_features, d_input);
    }
  }
  return grads;
}

}  // namespace alinet
