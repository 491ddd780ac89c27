#include "polyselect/prototypes.hpp"

#include <cmath>

namespace polyselect {

PrototypeSet build_prototypes(const LabeledSet& support) {
  const auto k = static_cast<std::size_t>(support.k());
  PrototypeSet protos{Matrix(k, support.dim()), {}};
  const auto counts = support.class_counts();
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) throw DomainError("build_prototypes: class " + std::to_string(c) + " has no support examples");
    protos.class_ids.push_back(static_cast<int>(c));
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto mean = protos.means.row(static_cast<std::size_t>(support.labels()[i]));
    const auto x = support.features().row(i);
    for (std::size_t f = 0; f < x.size(); ++f) mean[f] += x[f];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& v : protos.means.row(c)) v /= static_cast<double>(counts[c]);
  }
  return protos;
}

ClassProbabilities proto_classify(const Matrix& queries, const PrototypeSet& protos, double tau_inv) {
  if (queries.cols() != protos.means.cols()) throw DomainError("proto_classify: query and prototype widths differ");
  if (!(tau_inv > 0.0) || !std::isfinite(tau_inv)) throw DomainError("tau_inv must be positive and finite");
  const Matrix scores = similarity_matrix(KernelKind::SqEuclidean, queries, protos.means);
  return ClassProbabilities(softmax_rows(scores, tau_inv));
}

ClassProbabilities proto_classify(const Task& task, double tau_inv) {
  task.validate();
  return proto_classify(task.query.features(), build_prototypes(task.support), tau_inv);
}

}  // namespace polyselect
