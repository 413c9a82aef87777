#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "mlstm/autodiff/graph.hpp"
#include "mlstm/model/params.hpp"

namespace mlstm::training {

inline constexpr Real kBeta1 = Real(0.9);
inline constexpr Real kBeta2 = Real(0.999);
inline constexpr Real kAdamaxEpsilon = Real(1e-8);

class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(std::string parameter)
      : std::runtime_error("non-finite gradient for parameter '" + parameter + "'"),
        parameter_(std::move(parameter)) {}
  const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

struct AdamaxState {
  std::map<std::string, Tensor> m;  // first moment
  std::map<std::string, Tensor> u;  // exponentially weighted infinity norm
  std::uint64_t t = 0;
};

/// t += 1; m = b1 m + (1-b1) g; u = max(b2 u, |g|);
/// theta -= lr / (1 - b1^t) * m / (u + eps).
/// Every gradient is checked before anything is touched, so a non-finite
/// entry leaves parameters and state unchanged. Parameters without a
/// gradient entry are left alone.
void adamax_step(model::ModelParams& params, const ad::Gradients& gradients, AdamaxState& state, Real lr);

/// Global L2 norm over every gradient tensor.
Real gradient_norm(const ad::Gradients& gradients);
/// Rescales so the global norm is at most `max_norm`. Returns the norm before clipping.
Real clip_gradients(ad::Gradients& gradients, Real max_norm);

}  // namespace mlstm::training
