// Prototype (class-mean) baseline with softmax over negative squared distances.
#pragma once

#include "polyselect/core.hpp"
#include "polyselect/kernels.hpp"

namespace polyselect {

struct PrototypeSet {
  /// Row c is the mean of class c's support rows.
  Matrix means;
  std::vector<int> class_ids;
};

/// Throws DomainError if any class in [0, k) has no support example.
PrototypeSet build_prototypes(const LabeledSet& support);

/// Row i = softmax_c(-tau * |q_i - m_c|^2).
ClassProbabilities proto_classify(const Matrix& queries, const PrototypeSet& protos, double tau_inv = 1.0);

/// build_prototypes on the task's support followed by proto_classify.
ClassProbabilities proto_classify(const Task& task, double tau_inv = 1.0);

}  // namespace polyselect
