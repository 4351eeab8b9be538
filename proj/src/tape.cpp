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
#include "pulsepinn/tape.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstring>
#include <string>

namespace pulsepinn::tape {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using CMapVec = Eigen::Map<const Eigen::VectorXd>;

const char* op_name(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kInput: return "input";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kNeg: return "neg";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kExp: return "exp";
    case Op::kSqrt: return "sqrt";
    case Op::kSquare: return "square";
    case Op::kAbs: return "abs";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kStep: return "step";
    case Op::kFma: return "fma_chain";
    case Op::kGemm: return "gemm";
    case Op::kSum: return "sum";
    case Op::kSlice: return "slice";
    case Op::kPackLane: return "pack_lane";
    case Op::kCMatMul: return "cmat_mul";
    case Op::kCMatVec: return "cmat_vec";
    case Op::kCScale: return "cscale";
    case Op::kCOuter: return "couter";
    case Op::kCTrace: return "ctrace";
  }
  return "?";
}

// z = a*b accumulated into (zre, zim), packed column-major complex blocks.
void cmatmul_kernel(std::int32_t d, const double* are, const double* aim,
                    const double* bre, const double* bim, double* zre,
                    double* zim, bool accumulate) {
  if (!accumulate) {
    std::memset(zre, 0, sizeof(double) * d * d);
    std::memset(zim, 0, sizeof(double) * d * d);
  }
  for (std::int32_t c = 0; c < d; ++c) {
    for (std::int32_t k = 0; k < d; ++k) {
      const double br = bre[c * d + k];
      const double bi = bim[c * d + k];
      const double* ar = are + k * d;
      const double* ai = aim + k * d;
      double* outr = zre + c * d;
      double* outi = zim + c * d;
      for (std::int32_t r = 0; r < d; ++r) {
        outr[r] += ar[r] * br - ai[r] * bi;
        outi[r] += ar[r] * bi + ai[r] * br;
      }
    }
  }
}

void cmatvec_kernel(std::int32_t d, const double* are, const double* aim,
                    const double* xre, const double* xim, double* zre,
                    double* zim, bool accumulate) {
  if (!accumulate) {
    std::memset(zre, 0, sizeof(double) * d);
    std::memset(zim, 0, sizeof(double) * d);
  }
  for (std::int32_t k = 0; k < d; ++k) {
    const double xr = xre[k];
    const double xi = xim[k];
    const double* ar = are + k * d;
    const double* ai = aim + k * d;
    for (std::int32_t r = 0; r < d; ++r) {
      zre[r] += ar[r] * xr - ai[r] * xi;
      zim[r] += ar[r] * xi + ai[r] * xr;
    }
  }
}

void couter_kernel(std::int32_t d, const double* xre, const double* xim,
                   const double* yre, const double* yim, double* zre,
                   double* zim, bool accumulate) {
  for (std::int32_t c = 0; c < d; ++c) {
    const double yr = yre[c];
    const double yi = yim[c];
    double* outr = zre + c * d;
    double* outi = zim + c * d;
    for (std::int32_t r = 0; r < d; ++r) {
      const double vr = xre[r] * yr + xim[r] * yi;
      const double vi = xim[r] * yr - xre[r] * yi;
      if (accumulate) {
        outr[r] += vr;
        outi[r] += vi;
      } else {
        outr[r] = vr;
        outi[r] = vi;
      }
    }
  }
}

}  // namespace

std::int32_t DiffGraph::check_id(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(ops_.size())) {
    throw ShapeMismatch("invalid node id " + std::to_string(id));
  }
  return id;
}

std::int32_t DiffGraph::broadcast_len(NodeId a, NodeId b) const {
  const std::int32_t la = len_[a];
  const std::int32_t lb = len_[b];
  if (la == lb) return la;
  if (la == 1) return lb;
  if (lb == 1) return la;
  throw ShapeMismatch("incompatible node lengths " + std::to_string(la) + " vs " +
                      std::to_string(lb));
}

NodeId DiffGraph::emit(Op op, std::int32_t len, NodeId a, NodeId b,
                       std::span<const std::int32_t> aux,
                       std::span<const double> auxf, bool alias_parent,
                       std::int64_t alias_off) {
  const NodeId id = static_cast<NodeId>(ops_.size());
  ops_.push_back(op);
  len_.push_back(len);
  arg0_.push_back(a);
  arg1_.push_back(b);
  aux_begin_.push_back(static_cast<std::int32_t>(aux_.size()));
  aux_count_.push_back(static_cast<std::int32_t>(aux.size()));
  aux_.insert(aux_.end(), aux.begin(), aux.end());
  auxf_begin_.push_back(static_cast<std::int32_t>(auxf_.size()));
  auxf_.insert(auxf_.end(), auxf.begin(), auxf.end());
  if (alias_parent) {
    off_.push_back(alias_off);
  } else {
    off_.push_back(static_cast<std::int64_t>(values_.size()));
    values_.resize(values_.size() + len, 0.0);
  }
  adjoints_ready_ = false;
  tangents_ready_ = false;
  if (op != Op::kConstant && op != Op::kInput && op != Op::kSlice) {
    compute(id);
    check_finite(id);
  }
  return id;
}

void DiffGraph::check_finite(NodeId i) {
  const double* v = vptr(i);
  const std::int32_t n = len_[i];
  for (std::int32_t j = 0; j < n; ++j) {
    if (!std::isfinite(v[j])) {
      throw NonFiniteValue(std::string("non-finite value in node ") +
                           std::to_string(i) + " (" + op_name(ops_[i]) + ")");
    }
  }
}

NodeId DiffGraph::constant(double v) {
  const NodeId id = emit(Op::kConstant, 1, kNoNode, kNoNode, {}, {});
  values_[off_[id]] = v;
  check_finite(id);
  return id;
}

NodeId DiffGraph::constant_vec(std::span<const double> v) {
  const NodeId id = emit(Op::kConstant, static_cast<std::int32_t>(v.size()),
                         kNoNode, kNoNode, {}, {});
  std::memcpy(vptr(id), v.data(), v.size() * sizeof(double));
  check_finite(id);
  return id;
}

NodeId DiffGraph::input(double v) {
  const NodeId id = emit(Op::kInput, 1, kNoNode, kNoNode, {}, {});
  values_[off_[id]] = v;
  check_finite(id);
  return id;
}

NodeId DiffGraph::input_vec(std::span<const double> v) {
  const NodeId id = emit(Op::kInput, static_cast<std::int32_t>(v.size()),
                         kNoNode, kNoNode, {}, {});
  std::memcpy(vptr(id), v.data(), v.size() * sizeof(double));
  check_finite(id);
  return id;
}

NodeId DiffGraph::input_zeros(std::int32_t len) {
  return emit(Op::kInput, len, kNoNode, kNoNode, {}, {});
}

NodeId DiffGraph::record_primitive(Op op_kind, std::span<const NodeId> inputs) {
  for (NodeId in : inputs) check_id(in);
  switch (op_kind) {
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
      if (inputs.size() != 2) throw ShapeMismatch("binary op expects 2 inputs");
      return binary(op_kind, inputs[0], inputs[1]);
    case Op::kNeg:
    case Op::kSin:
    case Op::kCos:
    case Op::kExp:
    case Op::kSqrt:
    case Op::kSquare:
    case Op::kAbs:
    case Op::kTanh:
    case Op::kRelu:
      if (inputs.size() != 1) throw ShapeMismatch("unary op expects 1 input");
      return unary(op_kind, inputs[0]);
    default:
      throw ShapeMismatch(std::string("record_primitive does not accept op ") +
                          op_name(op_kind));
  }
}

NodeId DiffGraph::binary(Op op, NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  return emit(op, broadcast_len(a, b), a, b, {}, {});
}

NodeId DiffGraph::unary(Op op, NodeId a) {
  check_id(a);
  return emit(op, len_[a], a, kNoNode, {}, {});
}

NodeId DiffGraph::add(NodeId a, NodeId b) { return binary(Op::kAdd, a, b); }
NodeId DiffGraph::sub(NodeId a, NodeId b) { return binary(Op::kSub, a, b); }
NodeId DiffGraph::mul(NodeId a, NodeId b) { return binary(Op::kMul, a, b); }
NodeId DiffGraph::div(NodeId a, NodeId b) { return binary(Op::kDiv, a, b); }
NodeId DiffGraph::neg(NodeId a) { return unary(Op::kNeg, a); }
NodeId DiffGraph::sin_(NodeId a) { return unary(Op::kSin, a); }
NodeId DiffGraph::cos_(NodeId a) { return unary(Op::kCos, a); }
NodeId DiffGraph::exp_(NodeId a) { return unary(Op::kExp, a); }
NodeId DiffGraph::sqrt_(NodeId a) { return unary(Op::kSqrt, a); }
NodeId DiffGraph::square(NodeId a) { return unary(Op::kSquare, a); }
NodeId DiffGraph::abs_(NodeId a) { return unary(Op::kAbs, a); }
NodeId DiffGraph::tanh_(NodeId a) { return unary(Op::kTanh, a); }
NodeId DiffGraph::relu(NodeId a) { return unary(Op::kRelu, a); }
NodeId DiffGraph::step(NodeId a) { return unary(Op::kStep, a); }

NodeId DiffGraph::fma_chain(std::span<const std::pair<NodeId, NodeId>> pairs) {
  if (pairs.empty()) throw ShapeMismatch("fma_chain needs at least one pair");
  std::int32_t out_len = 1;
  std::vector<std::int32_t> aux;
  aux.reserve(pairs.size() * 2);
  for (const auto& [x, y] : pairs) {
    check_id(x);
    check_id(y);
    out_len = std::max(out_len, broadcast_len(x, y));
    aux.push_back(x);
    aux.push_back(y);
  }
  for (const auto& [x, y] : pairs) {
    if (len_[x] != 1 && len_[x] != out_len)
      throw ShapeMismatch("fma_chain length mismatch");
    if (len_[y] != 1 && len_[y] != out_len)
      throw ShapeMismatch("fma_chain length mismatch");
  }
  return emit(Op::kFma, out_len, kNoNode, kNoNode, aux, {});
}

NodeId DiffGraph::gemm(NodeId a, NodeId b, NodeId bias, std::int32_t m,
                       std::int32_t k, std::int32_t n) {
  check_id(a);
  check_id(b);
  if (len_[a] != m * k || len_[b] != k * n)
    throw ShapeMismatch("gemm operand size mismatch");
  if (bias != kNoNode && len_[check_id(bias)] != m)
    throw ShapeMismatch("gemm bias size mismatch");
  const std::int32_t aux[4] = {m, k, n, bias};
  return emit(Op::kGemm, m * n, a, b, aux, {});
}

NodeId DiffGraph::sum(NodeId a) {
  check_id(a);
  return emit(Op::kSum, 1, a, kNoNode, {}, {});
}

NodeId DiffGraph::slice(NodeId a, std::int32_t offset, std::int32_t len) {
  check_id(a);
  if (offset < 0 || len <= 0 || offset + len > len_[a])
    throw ShapeMismatch("slice out of range");
  const std::int32_t aux[1] = {offset};
  return emit(Op::kSlice, len, a, kNoNode, aux, {}, true, off_[a] + offset);
}

NodeId DiffGraph::pack_lane(std::span<const NodeId> nodes, std::int32_t lane) {
  if (nodes.empty()) throw ShapeMismatch("pack_lane needs inputs");
  std::vector<std::int32_t> aux;
  aux.reserve(nodes.size() + 1);
  aux.push_back(lane);
  for (NodeId n : nodes) {
    check_id(n);
    if (len_[n] != 1 && lane >= len_[n])
      throw ShapeMismatch("pack_lane lane out of range");
    aux.push_back(n);
  }
  return emit(Op::kPackLane, static_cast<std::int32_t>(nodes.size()), kNoNode,
              kNoNode, aux, {});
}

NodeId DiffGraph::cmat_mul(NodeId a, NodeId b, std::int32_t d) {
  check_id(a);
  check_id(b);
  if (len_[a] != 2 * d * d || len_[b] != 2 * d * d)
    throw ShapeMismatch("cmat_mul operand size mismatch");
  const std::int32_t aux[1] = {d};
  return emit(Op::kCMatMul, 2 * d * d, a, b, aux, {});
}

NodeId DiffGraph::cmat_vec(NodeId a, NodeId x, std::int32_t d) {
  check_id(a);
  check_id(x);
  if (len_[a] != 2 * d * d || len_[x] != 2 * d)
    throw ShapeMismatch("cmat_vec operand size mismatch");
  const std::int32_t aux[1] = {d};
  return emit(Op::kCMatVec, 2 * d, a, x, aux, {});
}

NodeId DiffGraph::cscale(NodeId a, double alpha_re, double alpha_im) {
  check_id(a);
  if (len_[a] % 2 != 0) throw ShapeMismatch("cscale expects packed complex node");
  const double auxf[2] = {alpha_re, alpha_im};
  return emit(Op::kCScale, len_[a], a, kNoNode, {}, auxf);
}

NodeId DiffGraph::couter(NodeId x, NodeId y, std::int32_t d) {
  check_id(x);
  check_id(y);
  if (len_[x] != 2 * d || len_[y] != 2 * d)
    throw ShapeMismatch("couter operand size mismatch");
  const std::int32_t aux[1] = {d};
  return emit(Op::kCOuter, 2 * d * d, x, y, aux, {});
}

NodeId DiffGraph::ctrace(NodeId a, std::int32_t d) {
  check_id(a);
  if (len_[a] != 2 * d * d) throw ShapeMismatch("ctrace operand size mismatch");
  const std::int32_t aux[1] = {d};
  return emit(Op::kCTrace, 2, a, kNoNode, aux, {});
}

void DiffGraph::compute(NodeId i) {
  const Op op = ops_[i];
  const std::int32_t n = len_[i];
  double* z = vptr(i);
  const NodeId a = arg0_[i];
  const NodeId b = arg1_[i];

  auto ewise2 = [&](auto&& f) {
    const double* va = vptr(a);
    const double* vb = vptr(b);
    const std::int32_t la = len_[a];
    const std::int32_t lb = len_[b];
    if (la == n && lb == n) {
      for (std::int32_t j = 0; j < n; ++j) z[j] = f(va[j], vb[j]);
    } else if (la == 1) {
      const double s = va[0];
      for (std::int32_t j = 0; j < n; ++j) z[j] = f(s, vb[j]);
    } else {
      const double s = vb[0];
      for (std::int32_t j = 0; j < n; ++j) z[j] = f(va[j], s);
    }
  };
  auto ewise1 = [&](auto&& f) {
    const double* va = vptr(a);
    for (std::int32_t j = 0; j < n; ++j) z[j] = f(va[j]);
  };

  switch (op) {
    case Op::kConstant:
    case Op::kInput:
    case Op::kSlice:
      return;
    case Op::kAdd: ewise2([](double x, double y) { return x + y; }); return;
    case Op::kSub: ewise2([](double x, double y) { return x - y; }); return;
    case Op::kMul: ewise2([](double x, double y) { return x * y; }); return;
    case Op::kDiv: ewise2([](double x, double y) { return x / y; }); return;
    case Op::kNeg: ewise1([](double x) { return -x; }); return;
    case Op::kSin: ewise1([](double x) { return std::sin(x); }); return;
    case Op::kCos: ewise1([](double x) { return std::cos(x); }); return;
    case Op::kExp: ewise1([](double x) { return std::exp(x); }); return;
    case Op::kSqrt: ewise1([](double x) { return std::sqrt(x); }); return;
    case Op::kSquare: ewise1([](double x) { return x * x; }); return;
    case Op::kAbs: ewise1([](double x) { return std::abs(x); }); return;
    case Op::kTanh: ewise1([](double x) { return std::tanh(x); }); return;
    case Op::kRelu: ewise1([](double x) { return x > 0.0 ? x : 0.0; }); return;
    case Op::kStep: ewise1([](double x) { return x > 0.0 ? 1.0 : 0.0; }); return;
    case Op::kFma: {
      std::memset(z, 0, sizeof(double) * n);
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t pairs = aux_count_[i] / 2;
      for (std::int32_t p = 0; p < pairs; ++p) {
        const NodeId x = aux[2 * p];
        const NodeId y = aux[2 * p + 1];
        const double* vx = vptr(x);
        const double* vy = vptr(y);
        const bool sx = len_[x] == 1;
        const bool sy = len_[y] == 1;
        if (!sx && !sy) {
          for (std::int32_t j = 0; j < n; ++j) z[j] += vx[j] * vy[j];
        } else if (sx && !sy) {
          const double s = vx[0];
          for (std::int32_t j = 0; j < n; ++j) z[j] += s * vy[j];
        } else if (!sx && sy) {
          const double s = vy[0];
          for (std::int32_t j = 0; j < n; ++j) z[j] += vx[j] * s;
        } else {
          const double s = vx[0] * vy[0];
          for (std::int32_t j = 0; j < n; ++j) z[j] += s;
        }
      }
      return;
    }
    case Op::kGemm: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t m = aux[0], k = aux[1], nn = aux[2];
      const NodeId bias = aux[3];
      CMapMat A(vptr(a), m, k);
      CMapMat B(vptr(b), k, nn);
      MapMat Z(z, m, nn);
      Z.noalias() = A * B;
      if (bias != kNoNode) Z.colwise() += CMapVec(vptr(bias), m);
      return;
    }
    case Op::kSum: {
      const double* va = vptr(a);
      double acc = 0.0;
      for (std::int32_t j = 0; j < len_[a]; ++j) acc += va[j];
      z[0] = acc;
      return;
    }
    case Op::kPackLane: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t lane = aux[0];
      for (std::int32_t j = 0; j < n; ++j) {
        const NodeId src = aux[1 + j];
        z[j] = vptr(src)[len_[src] == 1 ? 0 : lane];
      }
      return;
    }
    case Op::kCMatMul: {
      const std::int32_t d = aux_[aux_begin_[i]];
      cmatmul_kernel(d, vptr(a), vptr(a) + d * d, vptr(b), vptr(b) + d * d, z,
                     z + d * d, false);
      return;
    }
    case Op::kCMatVec: {
      const std::int32_t d = aux_[aux_begin_[i]];
      cmatvec_kernel(d, vptr(a), vptr(a) + d * d, vptr(b), vptr(b) + d, z,
                     z + d, false);
      return;
    }
    case Op::kCScale: {
      const double ar = auxf_[auxf_begin_[i]];
      const double ai = auxf_[auxf_begin_[i] + 1];
      const std::int32_t h = n / 2;
      const double* vre = vptr(a);
      const double* vim = vptr(a) + h;
      for (std::int32_t j = 0; j < h; ++j) {
        z[j] = ar * vre[j] - ai * vim[j];
        z[h + j] = ar * vim[j] + ai * vre[j];
      }
      return;
    }
    case Op::kCOuter: {
      const std::int32_t d = aux_[aux_begin_[i]];
      couter_kernel(d, vptr(a), vptr(a) + d, vptr(b), vptr(b) + d, z, z + d * d,
                    false);
      return;
    }
    case Op::kCTrace: {
      const std::int32_t d = aux_[aux_begin_[i]];
      const double* vre = vptr(a);
      const double* vim = vptr(a) + d * d;
      double tr = 0.0, ti = 0.0;
      for (std::int32_t j = 0; j < d; ++j) {
        tr += vre[j * d + j];
        ti += vim[j * d + j];
      }
      z[0] = tr;
      z[1] = ti;
      return;
    }
  }
}

void DiffGraph::refresh() {
  const NodeId n = node_count();
  for (NodeId i = 0; i < n; ++i) {
    const Op op = ops_[i];
    if (op == Op::kConstant || op == Op::kInput || op == Op::kSlice) continue;
    compute(i);
    check_finite(i);
  }
  adjoints_ready_ = false;
  tangents_ready_ = false;
}

void DiffGraph::backward(NodeId root) {
  check_id(root);
  if (len_[root] != 1)
    throw ShapeMismatch("backward root must be a scalar node");
  adjoints_.assign(values_.size(), 0.0);
  adjoints_[off_[root]] = 1.0;
  for (NodeId i = root; i >= 0; --i) accumulate_adjoint(i);
  adjoints_ready_ = true;
}

void DiffGraph::accumulate_adjoint(NodeId i) {
  const Op op = ops_[i];
  if (op == Op::kConstant || op == Op::kInput || op == Op::kSlice ||
      op == Op::kStep)
    return;

  const std::int32_t n = len_[i];
  const double* zb = aptr(i);
  const NodeId a = arg0_[i];
  const NodeId b = arg1_[i];

  // contribution w[j] * zb[j] into target's adjoint, reducing when the
  // target is a broadcast scalar. w == nullptr means weight 1.
  auto scatter = [&](NodeId t, const double* w, double sign) {
    double* tb = aptr(t);
    if (len_[t] == n) {
      if (w) {
        for (std::int32_t j = 0; j < n; ++j) tb[j] += sign * w[j] * zb[j];
      } else {
        for (std::int32_t j = 0; j < n; ++j) tb[j] += sign * zb[j];
      }
    } else {
      double acc = 0.0;
      if (w) {
        for (std::int32_t j = 0; j < n; ++j) acc += w[j] * zb[j];
      } else {
        for (std::int32_t j = 0; j < n; ++j) acc += zb[j];
      }
      tb[0] += sign * acc;
    }
  };
  // same, with per-lane weight read from a possibly-broadcast node
  auto scatter_node_weight = [&](NodeId t, NodeId wnode, double sign) {
    double* tb = aptr(t);
    const double* w = vptr(wnode);
    const bool ws = len_[wnode] == 1;
    if (len_[t] == n) {
      if (ws) {
        const double s = sign * w[0];
        for (std::int32_t j = 0; j < n; ++j) tb[j] += s * zb[j];
      } else {
        for (std::int32_t j = 0; j < n; ++j) tb[j] += sign * w[j] * zb[j];
      }
    } else {
      double acc = 0.0;
      if (ws) {
        for (std::int32_t j = 0; j < n; ++j) acc += zb[j];
        acc *= w[0];
      } else {
        for (std::int32_t j = 0; j < n; ++j) acc += w[j] * zb[j];
      }
      tb[0] += sign * acc;
    }
  };

  switch (op) {
    case Op::kAdd:
      scatter(a, nullptr, 1.0);
      scatter(b, nullptr, 1.0);
      return;
    case Op::kSub:
      scatter(a, nullptr, 1.0);
      scatter(b, nullptr, -1.0);
      return;
    case Op::kMul:
      scatter_node_weight(a, b, 1.0);
      scatter_node_weight(b, a, 1.0);
      return;
    case Op::kDiv: {
      // z = a / b: da = zb / b, db = -zb * z / b
      const double* vb = vptr(b);
      const double* vz = vptr(i);
      double* ab = aptr(a);
      double* bb = aptr(b);
      const bool sa = len_[a] == 1;
      const bool sb = len_[b] == 1;
      for (std::int32_t j = 0; j < n; ++j) {
        const double bj = sb ? vb[0] : vb[j];
        const double g = zb[j] / bj;
        ab[sa ? 0 : j] += g;
        bb[sb ? 0 : j] -= g * vz[j];
      }
      return;
    }
    case Op::kNeg:
      scatter(a, nullptr, -1.0);
      return;
    case Op::kSin: {
      const double* va = vptr(a);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j) ab[j] += std::cos(va[j]) * zb[j];
      return;
    }
    case Op::kCos: {
      const double* va = vptr(a);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j) ab[j] -= std::sin(va[j]) * zb[j];
      return;
    }
    case Op::kExp:
      scatter(a, vptr(i), 1.0);
      return;
    case Op::kSqrt: {
      const double* vz = vptr(i);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j) ab[j] += zb[j] / (2.0 * vz[j]);
      return;
    }
    case Op::kSquare: {
      const double* va = vptr(a);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j) ab[j] += 2.0 * va[j] * zb[j];
      return;
    }
    case Op::kAbs: {
      const double* va = vptr(a);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j) {
        const double s = va[j] > 0.0 ? 1.0 : (va[j] < 0.0 ? -1.0 : 0.0);
        ab[j] += s * zb[j];
      }
      return;
    }
    case Op::kTanh: {
      const double* vz = vptr(i);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j)
        ab[j] += (1.0 - vz[j] * vz[j]) * zb[j];
      return;
    }
    case Op::kRelu: {
      const double* va = vptr(a);
      double* ab = aptr(a);
      for (std::int32_t j = 0; j < n; ++j)
        if (va[j] > 0.0) ab[j] += zb[j];
      return;
    }
    case Op::kFma: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t pairs = aux_count_[i] / 2;
      for (std::int32_t p = 0; p < pairs; ++p) {
        const NodeId x = aux[2 * p];
        const NodeId y = aux[2 * p + 1];
        scatter_node_weight(x, y, 1.0);
        scatter_node_weight(y, x, 1.0);
      }
      return;
    }
    case Op::kGemm: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t m = aux[0], k = aux[1], nn = aux[2];
      const NodeId bias = aux[3];
      CMapMat A(vptr(a), m, k);
      CMapMat B(vptr(b), k, nn);
      CMapMat Zb(aptr(i), m, nn);
      MapMat Ab(aptr(a), m, k);
      MapMat Bb(aptr(b), k, nn);
      Ab.noalias() += Zb * B.transpose();
      Bb.noalias() += A.transpose() * Zb;
      if (bias != kNoNode) MapVec(aptr(bias), m) += Zb.rowwise().sum();
      return;
    }
    case Op::kSum: {
      double* ab = aptr(a);
      const double g = zb[0];
      for (std::int32_t j = 0; j < len_[a]; ++j) ab[j] += g;
      return;
    }
    case Op::kPackLane: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t lane = aux[0];
      for (std::int32_t j = 0; j < n; ++j) {
        const NodeId src = aux[1 + j];
        aptr(src)[len_[src] == 1 ? 0 : lane] += zb[j];
      }
      return;
    }
    case Op::kCMatMul: {
      const std::int32_t d = aux_[aux_begin_[i]];
      const double* are = vptr(a);
      const double* aim = are + d * d;
      const double* bre = vptr(b);
      const double* bim = bre + d * d;
      const double* zbr = zb;
      const double* zbi = zb + d * d;
      double* dar = aptr(a);
      double* dai = dar + d * d;
      double* dbr = aptr(b);
      double* dbi = dbr + d * d;
      for (std::int32_t c = 0; c < d; ++c) {
        for (std::int32_t k = 0; k < d; ++k) {
          const double br = bre[c * d + k];
          const double bi = bim[c * d + k];
          const double* zr = zbr + c * d;
          const double* zi = zbi + c * d;
          double* gr = dar + k * d;
          double* gi = dai + k * d;
          for (std::int32_t r = 0; r < d; ++r) {
            gr[r] += zr[r] * br + zi[r] * bi;
            gi[r] += -zr[r] * bi + zi[r] * br;
          }
        }
      }
      for (std::int32_t c = 0; c < d; ++c) {
        for (std::int32_t k = 0; k < d; ++k) {
          const double* ar = are + k * d;
          const double* ai = aim + k * d;
          const double* zr = zbr + c * d;
          const double* zi = zbi + c * d;
          double accr = 0.0, acci = 0.0;
          for (std::int32_t r = 0; r < d; ++r) {
            accr += ar[r] * zr[r] + ai[r] * zi[r];
            acci += -ai[r] * zr[r] + ar[r] * zi[r];
          }
          dbr[c * d + k] += accr;
          dbi[c * d + k] += acci;
        }
      }
      return;
    }
    case Op::kCMatVec: {
      const std::int32_t d = aux_[aux_begin_[i]];
      const double* are = vptr(a);
      const double* aim = are + d * d;
      const double* xre = vptr(b);
      const double* xim = xre + d;
      const double* zbr = zb;
      const double* zbi = zb + d;
      double* dar = aptr(a);
      double* dai = dar + d * d;
      double* dxr = aptr(b);
      double* dxi = dxr + d;
      for (std::int32_t k = 0; k < d; ++k) {
        const double xr = xre[k];
        const double xi = xim[k];
        const double* ar = are + k * d;
        const double* ai = aim + k * d;
        double* gr = dar + k * d;
        double* gi = dai + k * d;
        double accr = 0.0, acci = 0.0;
        for (std::int32_t r = 0; r < d; ++r) {
          gr[r] += zbr[r] * xr + zbi[r] * xi;
          gi[r] += -zbr[r] * xi + zbi[r] * xr;
          accr += ar[r] * zbr[r] + ai[r] * zbi[r];
          acci += -ai[r] * zbr[r] + ar[r] * zbi[r];
        }
        dxr[k] += accr;
        dxi[k] += acci;
      }
      return;
    }
    case Op::kCScale: {
      const double ar = auxf_[auxf_begin_[i]];
      const double ai = auxf_[auxf_begin_[i] + 1];
      const std::int32_t h = n / 2;
      double* dre = aptr(a);
      double* dim = dre + h;
      for (std::int32_t j = 0; j < h; ++j) {
        dre[j] += ar * zb[j] + ai * zb[h + j];
        dim[j] += -ai * zb[j] + ar * zb[h + j];
      }
      return;
    }
    case Op::kCOuter: {
      const std::int32_t d = aux_[aux_begin_[i]];
      const double* xre = vptr(a);
      const double* xim = xre + d;
      const double* yre = vptr(b);
      const double* yim = yre + d;
      const double* zbr = zb;
      const double* zbi = zb + d * d;
      double* dxr = aptr(a);
      double* dxi = dxr + d;
      double* dyr = aptr(b);
      double* dyi = dyr + d;
      for (std::int32_t c = 0; c < d; ++c) {
        const double yr = yre[c];
        const double yi = yim[c];
        const double* zr = zbr + c * d;
        const double* zi = zbi + c * d;
        double accr = 0.0, acci = 0.0;
        for (std::int32_t r = 0; r < d; ++r) {
          dxr[r] += zr[r] * yr - zi[r] * yi;
          dxi[r] += zr[r] * yi + zi[r] * yr;
          accr += zr[r] * xre[r] + zi[r] * xim[r];
          acci += zr[r] * xim[r] - zi[r] * xre[r];
        }
        dyr[c] += accr;
        dyi[c] += acci;
      }
      return;
    }
    case Op::kCTrace: {
      const std::int32_t d = aux_[aux_begin_[i]];
      double* dre = aptr(a);
      double* dim = dre + d * d;
      for (std::int32_t j = 0; j < d; ++j) {
        dre[j * d + j] += zb[0];
        dim[j * d + j] += zb[1];
      }
      return;
    }
    default:
      return;
  }
}

void DiffGraph::forward_tangent(const TangentSeed& seed) {
  check_id(seed.seeded_input);
  if (ops_[seed.seeded_input] != Op::kInput)
    throw ShapeMismatch("tangent seed must refer to an input node");
  tangents_.assign(values_.size(), 0.0);
  {
    double* t = tptr(seed.seeded_input);
    for (std::int32_t j = 0; j < len_[seed.seeded_input]; ++j)
      t[j] = seed.seed_value;
  }
  const NodeId n = node_count();
  for (NodeId i = 0; i < n; ++i) node_tangent_values(i);
  tangents_ready_ = true;
}

void DiffGraph::node_tangent_values(NodeId i) {
  const Op op = ops_[i];
  if (op == Op::kConstant || op == Op::kInput || op == Op::kSlice) return;

  const std::int32_t n = len_[i];
  double* tz = tptr(i);
  const NodeId a = arg0_[i];
  const NodeId b = arg1_[i];

  auto val = [&](NodeId id, std::int32_t j) {
    return vptr(id)[len_[id] == 1 ? 0 : j];
  };
  auto tan = [&](NodeId id, std::int32_t j) {
    return tptr(id)[len_[id] == 1 ? 0 : j];
  };

  switch (op) {
    case Op::kAdd:
      for (std::int32_t j = 0; j < n; ++j) tz[j] = tan(a, j) + tan(b, j);
      return;
    case Op::kSub:
      for (std::int32_t j = 0; j < n; ++j) tz[j] = tan(a, j) - tan(b, j);
      return;
    case Op::kMul:
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = tan(a, j) * val(b, j) + val(a, j) * tan(b, j);
      return;
    case Op::kDiv: {
      const double* vz = vptr(i);
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = (tan(a, j) - vz[j] * tan(b, j)) / val(b, j);
      return;
    }
    case Op::kNeg:
      for (std::int32_t j = 0; j < n; ++j) tz[j] = -tan(a, j);
      return;
    case Op::kSin:
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = std::cos(val(a, j)) * tan(a, j);
      return;
    case Op::kCos:
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = -std::sin(val(a, j)) * tan(a, j);
      return;
    case Op::kExp: {
      const double* vz = vptr(i);
      for (std::int32_t j = 0; j < n; ++j) tz[j] = vz[j] * tan(a, j);
      return;
    }
    case Op::kSqrt: {
      const double* vz = vptr(i);
      for (std::int32_t j = 0; j < n; ++j) tz[j] = tan(a, j) / (2.0 * vz[j]);
      return;
    }
    case Op::kSquare:
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = 2.0 * val(a, j) * tan(a, j);
      return;
    case Op::kAbs:
      for (std::int32_t j = 0; j < n; ++j) {
        const double v = val(a, j);
        const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        tz[j] = s * tan(a, j);
      }
      return;
    case Op::kTanh: {
      const double* vz = vptr(i);
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = (1.0 - vz[j] * vz[j]) * tan(a, j);
      return;
    }
    case Op::kRelu:
      for (std::int32_t j = 0; j < n; ++j)
        tz[j] = val(a, j) > 0.0 ? tan(a, j) : 0.0;
      return;
    case Op::kStep:
      std::memset(tz, 0, sizeof(double) * n);
      return;
    case Op::kFma: {
      std::memset(tz, 0, sizeof(double) * n);
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t pairs = aux_count_[i] / 2;
      for (std::int32_t p = 0; p < pairs; ++p) {
        const NodeId x = aux[2 * p];
        const NodeId y = aux[2 * p + 1];
        for (std::int32_t j = 0; j < n; ++j)
          tz[j] += tan(x, j) * val(y, j) + val(x, j) * tan(y, j);
      }
      return;
    }
    case Op::kGemm: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t m = aux[0], k = aux[1], nn = aux[2];
      const NodeId bias = aux[3];
      CMapMat A(vptr(a), m, k);
      CMapMat B(vptr(b), k, nn);
      CMapMat Ta(tptr(a), m, k);
      CMapMat Tb(tptr(b), k, nn);
      MapMat Tz(tz, m, nn);
      Tz.noalias() = Ta * B;
      Tz.noalias() += A * Tb;
      if (bias != kNoNode) Tz.colwise() += CMapVec(tptr(bias), m);
      return;
    }
    case Op::kSum: {
      double acc = 0.0;
      const double* ta = tptr(a);
      for (std::int32_t j = 0; j < len_[a]; ++j) acc += ta[j];
      tz[0] = acc;
      return;
    }
    case Op::kPackLane: {
      const std::int32_t* aux = aux_.data() + aux_begin_[i];
      const std::int32_t lane = aux[0];
      for (std::int32_t j = 0; j < n; ++j) {
        const NodeId src = aux[1 + j];
        tz[j] = tptr(src)[len_[src] == 1 ? 0 : lane];
      }
      return;
    }
    case Op::kCMatMul: {
      const std::int32_t d = aux_[aux_begin_[i]];
      cmatmul_kernel(d, tptr(a), tptr(a) + d * d, vptr(b), vptr(b) + d * d, tz,
                     tz + d * d, false);
      cmatmul_kernel(d, vptr(a), vptr(a) + d * d, tptr(b), tptr(b) + d * d, tz,
                     tz + d * d, true);
      return;
    }
    case Op::kCMatVec: {
      const std::int32_t d = aux_[aux_begin_[i]];
      cmatvec_kernel(d, tptr(a), tptr(a) + d * d, vptr(b), vptr(b) + d, tz,
                     tz + d, false);
      cmatvec_kernel(d, vptr(a), vptr(a) + d * d, tptr(b), tptr(b) + d, tz,
                     tz + d, true);
      return;
    }
    case Op::kCScale: {
      const double ar = auxf_[auxf_begin_[i]];
      const double ai = auxf_[auxf_begin_[i] + 1];
      const std::int32_t h = n / 2;
      const double* tre = tptr(a);
      const double* tim = tre + h;
      for (std::int32_t j = 0; j < h; ++j) {
        tz[j] = ar * tre[j] - ai * tim[j];
        tz[h + j] = ar * tim[j] + ai * tre[j];
      }
      return;
    }
    case Op::kCOuter: {
      const std::int32_t d = aux_[aux_begin_[i]];
      couter_kernel(d, tptr(a), tptr(a) + d, vptr(b), vptr(b) + d, tz, tz + d * d,
                    false);
      couter_kernel(d, vptr(a), vptr(a) + d, tptr(b), tptr(b) + d, tz, tz + d * d,
                    true);
      return;
    }
    case Op::kCTrace: {
      const std::int32_t d = aux_[aux_begin_[i]];
      const double* tre = tptr(a);
      const double* tim = tre + d * d;
      double tr = 0.0, ti = 0.0;
      for (std::int32_t j = 0; j < d; ++j) {
        tr += tre[j * d + j];
        ti += tim[j * d + j];
      }
      tz[0] = tr;
      tz[1] = ti;
      return;
    }
    default:
      return;
  }
}

std::vector<NodeId> DiffGraph::record_tangent(const TangentSeed& seed) {
  check_id(seed.seeded_input);
  if (ops_[seed.seeded_input] != Op::kInput)
    throw ShapeMismatch("tangent seed must refer to an input node");

  const NodeId n0 = node_count();
  std::vector<NodeId> tmap(n0, kNoNode);
  NodeId zero_const = kNoNode;
  auto zero = [&]() {
    if (zero_const == kNoNode) zero_const = constant(0.0);
    return zero_const;
  };

  {
    const std::int32_t len = len_[seed.seeded_input];
    if (len == 1) {
      tmap[seed.seeded_input] = constant(seed.seed_value);
    } else {
      std::vector<double> ones(len, seed.seed_value);
      tmap[seed.seeded_input] = constant_vec(ones);
    }
  }

  for (NodeId i = 0; i < n0; ++i) {
    if (tmap[i] != kNoNode) continue;  // seeded input
    const Op op = ops_[i];
    const NodeId a = arg0_[i];
    const NodeId b = arg1_[i];
    const NodeId ta = a != kNoNode ? tmap[a] : kNoNode;
    const NodeId tb = b != kNoNode ? tmap[b] : kNoNode;

    switch (op) {
      case Op::kConstant:
      case Op::kInput:
      case Op::kStep:
        break;
      case Op::kAdd:
        if (ta != kNoNode && tb != kNoNode) tmap[i] = add(ta, tb);
        else if (ta != kNoNode) tmap[i] = ta;
        else if (tb != kNoNode) tmap[i] = tb;
        break;
      case Op::kSub:
        if (ta != kNoNode && tb != kNoNode) tmap[i] = sub(ta, tb);
        else if (ta != kNoNode) tmap[i] = ta;
        else if (tb != kNoNode) tmap[i] = neg(tb);
        break;
      case Op::kMul:
        if (ta != kNoNode && tb != kNoNode)
          tmap[i] = add(mul(ta, b), mul(a, tb));
        else if (ta != kNoNode) tmap[i] = mul(ta, b);
        else if (tb != kNoNode) tmap[i] = mul(a, tb);
        break;
      case Op::kDiv:
        if (ta != kNoNode && tb != kNoNode)
          tmap[i] = div(sub(ta, mul(i, tb)), b);
        else if (ta != kNoNode) tmap[i] = div(ta, b);
        else if (tb != kNoNode) tmap[i] = neg(div(mul(i, tb), b));
        break;
      case Op::kNeg:
        if (ta != kNoNode) tmap[i] = neg(ta);
        break;
      case Op::kSin:
        if (ta != kNoNode) tmap[i] = mul(cos_(a), ta);
        break;
      case Op::kCos:
        if (ta != kNoNode) tmap[i] = neg(mul(sin_(a), ta));
        break;
      case Op::kExp:
        if (ta != kNoNode) tmap[i] = mul(i, ta);
        break;
      case Op::kSqrt:
        if (ta != kNoNode) tmap[i] = mul(constant(0.5), div(ta, i));
        break;
      case Op::kSquare:
        if (ta != kNoNode) tmap[i] = mul(constant(2.0), mul(a, ta));
        break;
      case Op::kAbs:
        // sign(a) * ta; a == 0 yields 0/0 which trips the NaN policy —
        // acceptable: |x| has no derivative there.
        if (ta != kNoNode) tmap[i] = mul(div(a, i), ta);
        break;
      case Op::kTanh:
        if (ta != kNoNode)
          tmap[i] = mul(sub(constant(1.0), square(i)), ta);
        break;
      case Op::kRelu:
        if (ta != kNoNode) tmap[i] = mul(step(a), ta);
        break;
      case Op::kFma: {
        const std::int32_t* aux = aux_.data() + aux_begin_[i];
        const std::int32_t pairs = aux_count_[i] / 2;
        std::vector<std::pair<NodeId, NodeId>> tpairs;
        for (std::int32_t p = 0; p < pairs; ++p) {
          const NodeId x = aux[2 * p];
          const NodeId y = aux[2 * p + 1];
          if (tmap[x] != kNoNode) tpairs.emplace_back(tmap[x], y);
          if (tmap[y] != kNoNode) tpairs.emplace_back(x, tmap[y]);
        }
        if (!tpairs.empty()) tmap[i] = fma_chain(tpairs);
        break;
      }
      case Op::kGemm: {
        const std::int32_t* aux = aux_.data() + aux_begin_[i];
        const std::int32_t m = aux[0], k = aux[1], nn = aux[2];
        const NodeId bias = aux[3];
        const NodeId tbias = bias != kNoNode ? tmap[bias] : kNoNode;
        NodeId acc = kNoNode;
        if (ta != kNoNode) acc = gemm(ta, b, kNoNode, m, k, nn);
        if (tb != kNoNode) {
          const NodeId t2 = gemm(a, tb, tbias, m, k, nn);
          acc = acc == kNoNode ? t2 : add(acc, t2);
        } else if (tbias != kNoNode) {
          throw ShapeMismatch("gemm tangent: bias-only tangent unsupported");
        }
        if (acc != kNoNode) tmap[i] = acc;
        break;
      }
      case Op::kSum:
        if (ta != kNoNode) {
          if (len_[ta] == len_[a]) tmap[i] = sum(ta);
          else tmap[i] = mul(constant(static_cast<double>(len_[a])), ta);
        }
        break;
      case Op::kSlice: {
        if (ta == kNoNode) break;
        const std::int32_t offset = aux_[aux_begin_[i]];
        if (len_[ta] == len_[a]) tmap[i] = slice(ta, offset, len_[i]);
        else if (len_[ta] == 1) tmap[i] = ta;
        else throw ShapeMismatch("slice tangent length mismatch");
        break;
      }
      case Op::kPackLane: {
        const std::int32_t* aux = aux_.data() + aux_begin_[i];
        const std::int32_t lane = aux[0];
        const std::int32_t cnt = len_[i];
        bool any = false;
        for (std::int32_t j = 0; j < cnt; ++j)
          if (tmap[aux[1 + j]] != kNoNode) any = true;
        if (!any) break;
        std::vector<NodeId> tsrcs(cnt);
        for (std::int32_t j = 0; j < cnt; ++j) {
          const NodeId src = aux[1 + j];
          tsrcs[j] = tmap[src] != kNoNode ? tmap[src] : zero();
        }
        tmap[i] = pack_lane(tsrcs, lane);
        break;
      }
      case Op::kCMatMul: {
        const std::int32_t d = aux_[aux_begin_[i]];
        NodeId acc = kNoNode;
        if (ta != kNoNode) acc = cmat_mul(ta, b, d);
        if (tb != kNoNode) {
          const NodeId t2 = cmat_mul(a, tb, d);
          acc = acc == kNoNode ? t2 : add(acc, t2);
        }
        if (acc != kNoNode) tmap[i] = acc;
        break;
      }
      case Op::kCMatVec: {
        const std::int32_t d = aux_[aux_begin_[i]];
        NodeId acc = kNoNode;
        if (ta != kNoNode) acc = cmat_vec(ta, b, d);
        if (tb != kNoNode) {
          const NodeId t2 = cmat_vec(a, tb, d);
          acc = acc == kNoNode ? t2 : add(acc, t2);
        }
        if (acc != kNoNode) tmap[i] = acc;
        break;
      }
      case Op::kCScale:
        if (ta != kNoNode)
          tmap[i] = cscale(ta, auxf_[auxf_begin_[i]], auxf_[auxf_begin_[i] + 1]);
        break;
      case Op::kCOuter: {
        const std::int32_t d = aux_[aux_begin_[i]];
        NodeId acc = kNoNode;
        if (ta != kNoNode) acc = couter(ta, b, d);
        if (tb != kNoNode) {
          const NodeId t2 = couter(a, tb, d);
          acc = acc == kNoNode ? t2 : add(acc, t2);
        }
        if (acc != kNoNode) tmap[i] = acc;
        break;
      }
      case Op::kCTrace:
        if (ta != kNoNode) tmap[i] = ctrace(ta, aux_[aux_begin_[i]]);
        break;
    }
  }
  return tmap;
}

void DiffGraph::set_input(NodeId id, double v) {
  check_id(id);
  if (ops_[id] != Op::kInput) throw ShapeMismatch("set_input on non-input node");
  if (len_[id] != 1) throw ShapeMismatch("set_input scalar on vector input");
  if (!std::isfinite(v)) throw NonFiniteValue("non-finite input value");
  values_[off_[id]] = v;
}

void DiffGraph::set_input(NodeId id, std::span<const double> v) {
  check_id(id);
  if (ops_[id] != Op::kInput) throw ShapeMismatch("set_input on non-input node");
  if (static_cast<std::int32_t>(v.size()) != len_[id])
    throw ShapeMismatch("set_input length mismatch");
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteValue("non-finite input value");
  std::memcpy(vptr(id), v.data(), v.size() * sizeof(double));
}

std::span<double> DiffGraph::input_storage(NodeId id) {
  check_id(id);
  if (ops_[id] != Op::kInput) throw ShapeMismatch("input_storage on non-input");
  return {vptr(id), static_cast<std::size_t>(len_[id])};
}

std::span<const double> DiffGraph::value(NodeId id) const {
  check_id(id);
  return {vptr(id), static_cast<std::size_t>(len_[id])};
}

double DiffGraph::value_scalar(NodeId id) const {
  check_id(id);
  return vptr(id)[0];
}

std::span<const double> DiffGraph::adjoint(NodeId id) const {
  check_id(id);
  if (!adjoints_ready_) throw ShapeMismatch("backward has not been run");
  return {adjoints_.data() + off_[id], static_cast<std::size_t>(len_[id])};
}

double DiffGraph::adjoint_scalar(NodeId id) const { return adjoint(id)[0]; }

std::span<const double> DiffGraph::tangent(NodeId id) const {
  check_id(id);
  if (!tangents_ready_) throw ShapeMismatch("forward_tangent has not been run");
  return {tangents_.data() + off_[id], static_cast<std::size_t>(len_[id])};
}

}  // namespace pulsepinn::tape
