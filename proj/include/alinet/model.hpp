#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alinet/kg.hpp"
#include "alinet/numerics.hpp"
#include "alinet/sparse.hpp"

namespace alinet {

enum class Variant { alinet, gcn_only, mix, add, gat_shared };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelConfig {
  // Input dimension followed by one output dimension per layer.
  std::vector<int> layer_dims = {500, 400, 300};
  int hops = 2;  // k: neighborhood radius aggregated inside each layer
  Variant variant = Variant::alinet;
  // Sigmoid keeps the gate in (0,1) so the combination stays convex; relu is
  // available as an option but lets the gate extrapolate past the streams.
  Act gate_activation = Act::sigmoid;
  Act aggregation_activation = Act::tanh;
  double leaky_slope = 0.2;

  int num_layers() const { return static_cast<int>(layer_dims.size()) - 1; }
  int combined_dim() const;
  // Throws ConfigError on inconsistent settings.
  void validate() const;
  // k = 1 means there is nothing beyond the one-hop path, and mix over hop 1
  // is plain mean pooling, so both collapse to gcn_only.
  bool uses_attention() const;
  bool uses_gates() const { return uses_attention() && (variant == Variant::alinet || variant == Variant::gat_shared); }
};

// All trainable tensors. Which ones exist depends on the variant; absent
// ones are empty matrices. Biases are stored as 1 x dim rows.
struct ParameterSet {
  Matrix input_features;  // H0: num_entities x layer_dims[0]

  struct LayerParams {
    Matrix weight;                     // one-hop aggregation weight
    std::vector<Matrix> hop_weights;   // per hop m = 2..k
    std::vector<Matrix> attn_self;     // M1 per hop
    std::vector<Matrix> attn_neighbor; // M2 per hop (empty when shared)
    std::vector<Matrix> gate_weight;   // per fold step 1..k-1
    std::vector<Matrix> gate_bias;
  };
  std::vector<LayerParams> layers;

  // Stable (name, tensor) enumeration used by Adam, checkpoints and the
  // gradient checker.
  void for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn);
  void for_each_tensor(const std::function<void(const std::string&, const Matrix&)>& fn) const;
  std::vector<Matrix*> tensor_ptrs();
  std::vector<const Matrix*> tensor_ptrs() const;
};

// Xavier-initialized parameters sized for `num_entities` and `config`.
ParameterSet init_parameters(const ModelConfig& config, int num_entities, Rng& rng);
// Zero-filled gradients (or momentum buffers) with the same structure.
ParameterSet zeros_like(const ParameterSet& params);

// Everything the backward pass and per-layer evaluation need.
struct ForwardTrace {
  struct HopTrace {
    Matrix attn_self_proj;      // X * M1^T
    Matrix attn_neighbor_proj;  // X * M2^T (empty when shared)
    SparseMatrix scores;        // LeakyReLU'd attention scores on the mask
    SparseMatrix alpha;         // masked softmax of scores
    Matrix transformed;         // X * W_m
    Matrix hidden;              // act(alpha * transformed)
  };
  struct LayerTrace {
    Matrix input;                  // X = previous layer's combined output
    Matrix one_hop_hidden;         // act(A * X * W)
    std::vector<HopTrace> hop;     // m = 2..k
    std::vector<Matrix> gate;      // g per fold step
    std::vector<Matrix> combined;  // running combination after each fold step
    Matrix output;                 // layer result fed to the next layer
    Matrix normalized;             // l2-normalized rows of output
    std::vector<double> norms;
  };

  ModelConfig config;
  std::vector<LayerTrace> layers;
  Matrix final;  // concatenation of the normalized per-layer outputs

  const Matrix& layer_output(int l) const { return layers[l - 1].output; }
};

// --- layer building blocks (exposed for tests and oracles) ---

// act(adj_norm * H_prev * W)
Matrix one_hop_aggregate(const Matrix& h_prev, const SparseMatrix& adj_norm,
                         const Matrix& weight, Act act, double slope = 0.2);
// Masked softmax of LeakyReLU((M1 h_i)^T (M2 h_j)) over the mask pattern.
// Pass the same matrix for both transforms to share them (the gat variant).
SparseMatrix attention_weights(const Matrix& h_in, const Matrix& attn_self,
                               const Matrix& attn_neighbor, const SparseMatrix& mask,
                               double leaky_slope);
// act(alpha * H_prev * W)
Matrix two_hop_aggregate(const Matrix& h_prev, const SparseMatrix& alpha,
                         const Matrix& weight, Act act, double slope = 0.2);
// g = gate_act(H2 * M^T + b);  H = g . H1 + (1-g) . H2. Returns (H, g).
std::pair<Matrix, Matrix> gate_combine(const Matrix& h1, const Matrix& h2,
                                       const Matrix& gate_weight,
                                       const Matrix& gate_bias, Act gate_act);

ForwardTrace forward(const ParameterSet& params, const NeighborStructure& structure,
                     const ModelConfig& config);

// Exact reverse-mode gradients of a scalar loss with gradient `d_final`
// w.r.t. the combined representation, plus optional direct per-layer
// gradients w.r.t. each layer output (index l-1).
ParameterSet backward(const ForwardTrace& trace, const NeighborStructure& structure,
                      const ParameterSet& params, const Matrix& d_final,
                      const std::vector<Matrix>* d_layer_outputs = nullptr);

}  // namespace alinet
