#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alinet/model.hpp"
#include "alinet/objective.hpp"

namespace alinet {

// Verifies the analytic gradients of the full training objective against
// central finite differences on a small random instance, tensor by tensor.
struct GradcheckConfig {
  int entities_per_side = 5;
  int num_relations_per_side = 1;  // joint relation count = 2x this
  std::vector<int> layer_dims = {8, 6, 4};
  int hops = 2;
  Variant variant = Variant::alinet;
  double step = 1e-5;       // finite-difference h
  double tolerance = 1e-4;  // max relative error allowed
  std::uint64_t rng_seed = 9;
  // Multiplies the analytic gradients before comparison. 1.0 checks the real
  // implementation; anything else is a negative control that must fail.
  double debug_grad_scale = 1.0;

  void validate() const;
};

struct GradcheckResult {
  struct TensorReport {
    std::string name;
    double max_rel_error = 0.0;
  };
  std::vector<TensorReport> tensors;
  double max_rel_error = 0.0;
  std::string worst_tensor;

  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

GradcheckResult run_gradcheck(const GradcheckConfig& cfg);

}  // namespace alinet
