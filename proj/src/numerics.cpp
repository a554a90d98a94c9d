#include "alinet/numerics.hpp"

#include <cmath>

#include "alinet/errors.hpp"

namespace alinet {

std::string act_name(Act a) {
  switch (a) {
    case Act::identity: return "identity";
    case Act::tanh: return "tanh";
    case Act::relu: return "relu";
    case Act::leaky_relu: return "leaky_relu";
    case Act::sigmoid: return "sigmoid";
  }
  return "?";
}

Act act_from_name(const std::string& name) {
  if (name == "identity") return Act::identity;
  if (name == "tanh") return Act::tanh;
  if (name == "relu") return Act::relu;
  if (name == "leaky_relu") return Act::leaky_relu;
  if (name == "sigmoid") return Act::sigmoid;
  throw ConfigError("unknown activation '" + name + "'");
}

namespace {

inline double act_scalar(double x, Act kind, double slope) {
  switch (kind) {
    case Act::identity: return x;
    case Act::tanh: return std::tanh(x);
    case Act::relu: return x > 0.0 ? x : 0.0;
    case Act::leaky_relu: return x > 0.0 ? x : slope * x;
    case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

}  // namespace

Matrix apply_activation(const Matrix& m, Act kind, double slope) {
  if (kind == Act::leaky_relu && (slope <= 0.0 || slope >= 1.0)) {
    throw ConfigError("leaky_relu slope must be in (0,1)");
  }
  Matrix out = m;
  for (double& v : out.data) v = act_scalar(v, kind, slope);
  return out;
}

double activation_grad_from_output(double out, Act kind, double slope) {
  switch (kind) {
    case Act::identity: return 1.0;
    case Act::tanh: return 1.0 - out * out;
    case Act::relu: return out > 0.0 ? 1.0 : 0.0;
    case Act::leaky_relu: return out > 0.0 ? 1.0 : slope;
    case Act::sigmoid: return out * (1.0 - out);
  }
  return 1.0;
}

Matrix activation_grad_from_output(const Matrix& out, Act kind, double slope) {
  Matrix g = out;
  for (double& v : g.data) v = activation_grad_from_output(v, kind, slope);
  return g;
}

Matrix xavier_init(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw ShapeError("xavier_init: dimensions must be >= 1");
  const double bound = std::sqrt(6.0 / (rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += r[j] * r[j];
    norms[i] = std::sqrt(s);
  }
  return norms;
}

Matrix l2_normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (int i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += r[j] * r[j];
    const double n = std::sqrt(s);
    if (n == 0.0) continue;  // zero rows pass through
    double* o = out.row(i);
    for (int j = 0; j < m.cols; ++j) o[j] = r[j] / n;
  }
  return out;
}

Matrix l2_normalize_rows_backward(const Matrix& normalized,
                                  const std::vector<double>& norms,
                                  const Matrix& dnormalized) {
  if (!normalized.same_shape(dnormalized) ||
      norms.size() != static_cast<std::size_t>(normalized.rows)) {
    throw ShapeError("l2_normalize_rows_backward: shape mismatch");
  }
  Matrix dx = dnormalized;
  for (int i = 0; i < normalized.rows; ++i) {
    const double n = norms[i];
    if (n == 0.0) continue;
    const double* y = normalized.row(i);
    const double* dy = dnormalized.row(i);
    double dot = 0.0;
    for (int j = 0; j < normalized.cols; ++j) dot += y[j] * dy[j];
    double* out = dx.row(i);
    for (int j = 0; j < normalized.cols; ++j) out[j] = (dy[j] - y[j] * dot) / n;
  }
  return dx;
}

AdamState AdamState::init(const std::vector<const Matrix*>& params, AdamConfig cfg) {
  AdamState s;
  s.config = cfg;
  s.first_moment.reserve(params.size());
  s.second_moment.reserve(params.size());
  for (const Matrix* p : params) {
    s.first_moment.emplace_back(p->rows, p->cols);
    s.second_moment.emplace_back(p->rows, p->cols);
  }
  return s;
}

void adam_step(const std::vector<Matrix*>& params,
               const std::vector<const Matrix*>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ShapeError("adam_step: tensor count mismatch");
  }
  state.step += 1;
  const AdamConfig& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& p = *params[t];
    const Matrix& g = *grads[t];
    Matrix& m = state.first_moment[t];
    Matrix& v = state.second_moment[t];
    if (!p.same_shape(g) || !p.same_shape(m)) {
      throw ShapeError("adam_step: shape mismatch for tensor " + std::to_string(t));
    }
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double gi = g.data[i];
      m.data[i] = c.beta1 * m.data[i] + (1.0 - c.beta1) * gi;
      v.data[i] = c.beta2 * v.data[i] + (1.0 - c.beta2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

double finite_diff_check(const std::function<double()>& loss, Matrix& param,
                         const Matrix& analytic, double h, int max_coords,
                         Rng* rng) {
  if (!param.same_shape(analytic)) {
    throw ShapeError("finite_diff_check: gradient shape mismatch");
  }
  if (h <= 0.0) throw NumericError("finite_diff_check: h must be positive");

  std::vector<std::size_t> coords;
  const std::size_t n = param.data.size();
  if (max_coords > 0 && static_cast<std::size_t>(max_coords) < n) {
    if (rng == nullptr) throw ConfigError("finite_diff_check: sampling needs an rng");
    for (int k = 0; k < max_coords; ++k) coords.push_back(rng->below(n));
  } else {
    coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = i;
  }

  double max_rel = 0.0;
  for (std::size_t idx : coords) {
    const double saved = param.data[idx];
    param.data[idx] = saved + h;
    const double fp = loss();
    param.data[idx] = saved - h;
    const double fm = loss();
    param.data[idx] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite_diff_check: non-finite loss");
    }
    const double numeric = (fp - fm) / (2.0 * h);
    const double ga = analytic.data[idx];
    const double rel =
        std::abs(ga - numeric) / std::max(1e-8, std::abs(ga) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace alinet
