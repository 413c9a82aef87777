#include "mlstm/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mlstm::ad {

GradientCheckReport check_gradients(Graph& graph, const Bindings& bindings, NodeId loss,
                                    Real epsilon, Real tolerance) {
  graph.forward(bindings);
  const Gradients analytic = graph.backward(loss);

  GradientCheckReport report;
  for (const auto& [name, grad] : analytic) {
    const Tensor* bound = bindings.find(name);
    Tensor probe = *bound;
    Bindings perturbed = bindings;
    perturbed.bind(name, probe);

    ParameterCheck check;
    check.name = name;
    check.elements = probe.size();
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const Real original = probe[i];
      probe[i] = original + epsilon;
      graph.forward(perturbed);
      const Real up = graph.value(loss)(0, 0);
      probe[i] = original - epsilon;
      graph.forward(perturbed);
      const Real down = graph.value(loss)(0, 0);
      probe[i] = original;

      const Real numeric = (up - down) / (Real(2) * epsilon);
      const Real a = grad[i];
      const Real denom = std::max({std::abs(a), std::abs(numeric), Real(1e-8)});
      check.max_relative_error = std::max(check.max_relative_error, std::abs(a - numeric) / denom);
      check.max_abs_analytic = std::max(check.max_abs_analytic, std::abs(a));
    }
    check.passed = check.max_relative_error < tolerance;
    report.max_relative_error = std::max(report.max_relative_error, check.max_relative_error);
    report.passed = report.passed && check.passed;
    report.parameters.push_back(std::move(check));
  }

  graph.forward(bindings);
  return report;
}

}  // namespace mlstm::ad
