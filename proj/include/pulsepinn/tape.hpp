/* Copyright 2026 The PulsePINN Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef PULSEPINN_TAPE_HPP
#define PULSEPINN_TAPE_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pulsepinn/errors.hpp"

namespace pulsepinn::tape {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// 64-byte aligned storage keeps every arena base in the same alignment
// class across graph instances, which keeps vectorized sweeps bitwise
// reproducible run to run.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(
        ::operator new(n * sizeof(T), std::align_val_t(kAlign)));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t(kAlign));
  }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
  template <class U>
  bool operator!=(const AlignedAllocator<U>&) const {
    return false;
  }
};

using AlignedVec = std::vector<double, AlignedAllocator<double>>;

// Scalar primitives form the public recording surface. The remaining kinds
// are fused/wide kernels the graph builders use to batch work over the time
// grid; every node still holds plain real values and obeys the same
// value/adjoint/tangent contracts.
enum class Op : std::uint8_t {
  kConstant,
  kInput,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSin,
  kCos,
  kExp,
  kSqrt,
  kSquare,
  kAbs,
  kTanh,
  kRelu,
  kStep,      // heaviside(a), 0 at 0; derivative taken as 0 everywhere
  kFma,       // sum_j x_j * y_j, elementwise with scalar broadcast
  kGemm,      // Z = A(m x k) * B(k x n) [+ bias(m)], row-major blocks
  kSum,       // reduce all entries to one scalar
  kSlice,     // zero-copy view into a parent range
  kPackLane,  // gather one lane from each listed node into a vector
  kCMatMul,   // packed complex d x d matrix product
  kCMatVec,   // packed complex matrix * vector
  kCScale,    // packed complex scale by a complex constant
  kCOuter,    // packed complex outer product x * y^dagger
  kCTrace,    // packed complex trace -> [re, im]
};

// Forward-mode seed: d/d(input). seed_value lands in every lane of the
// seeded input node.
struct TangentSeed {
  NodeId seeded_input = kNoNode;
  double seed_value = 1.0;
};

// Append-only reverse-mode tape. Node values live in one arena; slices alias
// their parent's storage, so adjoint accumulation through views needs no
// special casing. Values are computed eagerly at record time and re-evaluated
// in place by refresh() after inputs change. Non-finite results throw
// NonFiniteValue at the node that produced them.
class DiffGraph {
 public:
  DiffGraph() = default;

  // --- scalar recording surface -------------------------------------------
  NodeId constant(double v);
  NodeId constant_vec(std::span<const double> v);
  NodeId input(double v);
  NodeId input_vec(std::span<const double> v);
  NodeId input_zeros(std::int32_t len);

  // Records one primitive from the public op set; arity is checked against
  // op_kind. Fused kinds are rejected here (they have dedicated emitters).
  NodeId record_primitive(Op op_kind, std::span<const NodeId> inputs);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId sin_(NodeId a);
  NodeId cos_(NodeId a);
  NodeId exp_(NodeId a);
  NodeId sqrt_(NodeId a);
  NodeId square(NodeId a);
  NodeId abs_(NodeId a);
  NodeId tanh_(NodeId a);
  NodeId relu(NodeId a);
  NodeId step(NodeId a);

  // --- fused / wide emitters ----------------------------------------------
  NodeId fma_chain(std::span<const std::pair<NodeId, NodeId>> pairs);
  // Z(m x n) = A(m x k) * B(k x n) + bias(m) broadcast along n. bias may be
  // kNoNode. All blocks row-major.
  NodeId gemm(NodeId a, NodeId b, NodeId bias, std::int32_t m, std::int32_t k,
              std::int32_t n);
  NodeId sum(NodeId a);
  NodeId slice(NodeId a, std::int32_t offset, std::int32_t len);
  NodeId pack_lane(std::span<const NodeId> nodes, std::int32_t lane);
  NodeId cmat_mul(NodeId a, NodeId b, std::int32_t d);
  NodeId cmat_vec(NodeId a, NodeId x, std::int32_t d);
  NodeId cscale(NodeId a, double alpha_re, double alpha_im);
  NodeId couter(NodeId x, NodeId y, std::int32_t d);
  NodeId ctrace(NodeId a, std::int32_t d);

  // --- sweeps ---------------------------------------------------------------
  // Re-evaluates every node in append order from current input values.
  void refresh();
  // Single reverse sweep from a scalar root; adjoints accumulate additively,
  // unreachable nodes keep adjoint 0.
  void backward(NodeId root);
  // Dual-number forward sweep; fills the tangent arena for every node.
  void forward_tangent(const TangentSeed& seed);
  // Materializes the tangent of every existing node as new graph primitives
  // (so d/dt results stay differentiable w.r.t. other inputs). Returns, per
  // node, the id of its tangent node, or kNoNode where the tangent is
  // identically zero. Entries may have smaller length than their primal when
  // the tangent is a broadcastable scalar.
  std::vector<NodeId> record_tangent(const TangentSeed& seed);

  // --- access ---------------------------------------------------------------
  void set_input(NodeId id, double v);
  void set_input(NodeId id, std::span<const double> v);
  // Writes directly into an input node's storage (used by the optimizer to
  // update weights in place).
  std::span<double> input_storage(NodeId id);

  std::span<const double> value(NodeId id) const;
  double value_scalar(NodeId id) const;
  std::span<const double> adjoint(NodeId id) const;
  double adjoint_scalar(NodeId id) const;
  std::span<const double> tangent(NodeId id) const;

  std::int32_t node_count() const { return static_cast<std::int32_t>(ops_.size()); }
  std::int32_t length(NodeId id) const { return len_[check_id(id)]; }
  Op op_kind(NodeId id) const { return ops_[check_id(id)]; }
  bool is_input(NodeId id) const { return ops_[check_id(id)] == Op::kInput; }
  std::size_t arena_size() const { return values_.size(); }

 private:
  NodeId emit(Op op, std::int32_t len, NodeId a, NodeId b,
              std::span<const std::int32_t> aux, std::span<const double> auxf,
              bool alias_parent = false, std::int64_t alias_off = 0);
  NodeId binary(Op op, NodeId a, NodeId b);
  NodeId unary(Op op, NodeId a);
  void compute(NodeId i);
  void check_finite(NodeId i);
  void accumulate_adjoint(NodeId i);
  void node_tangent_values(NodeId i);
  std::int32_t check_id(NodeId id) const;
  std::int32_t broadcast_len(NodeId a, NodeId b) const;

  const double* vptr(NodeId id) const { return values_.data() + off_[id]; }
  double* vptr(NodeId id) { return values_.data() + off_[id]; }
  double* aptr(NodeId id) { return adjoints_.data() + off_[id]; }
  double* tptr(NodeId id) { return tangents_.data() + off_[id]; }

  std::vector<Op> ops_;
  std::vector<std::int32_t> len_;
  std::vector<std::int64_t> off_;
  std::vector<NodeId> arg0_, arg1_;
  std::vector<std::int32_t> aux_begin_, aux_count_;
  std::vector<std::int32_t> auxf_begin_;
  std::vector<std::int32_t> aux_;
  std::vector<double> auxf_;
  AlignedVec values_;
  AlignedVec adjoints_;
  AlignedVec tangents_;
  bool adjoints_ready_ = false;
  bool tangents_ready_ = false;
};

}  // namespace pulsepinn::tape

#endif  // PULSEPINN_TAPE_HPP
