#pragma once

#include <string>
#include <vector>

#include "mlstm/autodiff/graph.hpp"

namespace mlstm::ad {

struct ParameterCheck {
  std::string name;
  std::size_t elements = 0;
  Real max_relative_error = 0;
  Real max_abs_analytic = 0;
  bool passed = true;
};

struct GradientCheckReport {
  std::vector<ParameterCheck> parameters;
  Real max_relative_error = 0;
  bool passed = true;
};

/// Compares backward() against central finite differences for every
/// kParameter input of `graph`. Relative error is |a - n| / max(|a|, |n|, 1e-8).
/// Frozen and data inputs are not part of the report. Leaves the graph
/// evaluated at the unperturbed bindings.
GradientCheckReport check_gradients(Graph& graph, const Bindings& bindings, NodeId loss,
                                    Real epsilon, Real tolerance);

}  // namespace mlstm::ad
