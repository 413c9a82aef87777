#include "mlstm/training/adamax.hpp"

#include <algorithm>
#include <cmath>

namespace mlstm::training {

void adamax_step(model::ModelParams& params, const ad::Gradients& gradients, AdamaxState& state, Real lr) {
  for (const auto& [name, g] : gradients) {
    if (!params.contains(name)) throw std::invalid_argument("gradient for unknown parameter '" + name + "'");
    if (g.shape() != params.at(name).shape()) {
      throw ShapeError("gradient for '" + name + "' has shape " + g.shape().str() + ", parameter is " +
                       params.at(name).shape().str());
    }
    if (!g.all_finite()) throw NonFiniteGradient(name);
  }

  ++state.t;
  const Real step = lr / (Real(1) - std::pow(kBeta1, static_cast<Real>(state.t)));
  for (const auto& [name, g] : gradients) {
    Tensor& theta = params.at(name);
    Tensor& m = state.m.try_emplace(name, theta.shape()).first->second;
    Tensor& u = state.u.try_emplace(name, theta.shape()).first->second;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = kBeta1 * m[i] + (Real(1) - kBeta1) * g[i];
      u[i] = std::max(kBeta2 * u[i], std::abs(g[i]));
      theta[i] -= step * m[i] / (u[i] + kAdamaxEpsilon);
    }
  }
}

Real gradient_norm(const ad::Gradients& gradients) {
  Real total = 0;
  for (const auto& [name, g] : gradients)
    for (Real v : g.data()) total += v * v;
  return std::sqrt(total);
}

Real clip_gradients(ad::Gradients& gradients, Real max_norm) {
  const Real norm = gradient_norm(gradients);
  if (norm > max_norm && norm > 0) {
    const Real s = max_norm / norm;
    for (auto& [name, g] : gradients)
      for (Real& v : g.data()) v *= s;
  }
  return norm;
}

}  // namespace mlstm::training
