// Copyright 2026 The DBRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dbrec/engine/graph.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "dbrec/common/errors.hpp"

namespace dbrec::engine {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

MapMat as_eigen(Matrix& m) { return MapMat(m.data(), m.rows(), m.cols()); }
ConstMapMat as_eigen(const Matrix& m) { return ConstMapMat(m.data(), m.rows(), m.cols()); }

constexpr double kProbClamp = 1e-12;
constexpr double kNormGuard = 1e-12;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kParameter: return "parameter";
    case OpKind::kConstant: return "constant";
    case OpKind::kGather: return "gather";
    case OpKind::kAffine: return "affine";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kMatmulNT: return "matmul_nt";
    case OpKind::kConcat: return "concat";
    case OpKind::kHadamard: return "hadamard";
    case OpKind::kDot: return "dot";
    case OpKind::kBilinear: return "bilinear";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kRelu: return "relu";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kAdd: return "add";
    case OpKind::kScale: return "scale";
    case OpKind::kShift: return "shift";
    case OpKind::kSum: return "sum";
    case OpKind::kMax0: return "max0";
    case OpKind::kLog: return "log";
    case OpKind::kBce: return "bce";
    case OpKind::kSoftmaxXent: return "softmax_xent";
    case OpKind::kNormalize: return "normalize";
    case OpKind::kSelectRows: return "select_rows";
    case OpKind::kBroadcastCols: return "broadcast_cols";
    case OpKind::kCustom: return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Construction

Var Graph::push(Node n) {
  for (std::uint32_t in : n.inputs) {
    if (nodes_[in].requires_grad) n.requires_grad = true;
  }
  if (n.sink != nullptr) n.requires_grad = true;
  nodes_.push_back(std::move(n));
  forwarded_ = false;
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) {
    throw UsageError("invalid node handle");
  }
  return nodes_[v.id];
}

std::string Graph::describe(std::uint32_t id) const {
  const Node& n = nodes_[id];
  std::string s = std::string(op_name(n.kind)) + " node #" + std::to_string(id);
  if (!n.label.empty()) s += " '" + n.label + "'";
  return s;
}

void Graph::check_same_shape(const char* op, Var a, Var b) const {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.rows != nb.rows || na.cols != nb.cols) {
    throw ConfigError(std::string(op) + " node #" + std::to_string(nodes_.size()) +
                      ": shape mismatch " + std::to_string(na.rows) + "x" +
                      std::to_string(na.cols) + " vs " + std::to_string(nb.rows) +
                      "x" + std::to_string(nb.cols));
  }
}

Var Graph::parameter(ParameterTensor& tensor) {
  Node n;
  n.kind = OpKind::kParameter;
  n.label = tensor.name;
  n.rows = tensor.rows();
  n.cols = tensor.cols();
  n.source = &tensor;
  n.sink = &tensor;
  return push(std::move(n));
}

Var Graph::parameter(const ParameterTensor& tensor) {
  Node n;
  n.kind = OpKind::kParameter;
  n.label = tensor.name;
  n.rows = tensor.rows();
  n.cols = tensor.cols();
  n.source = &tensor;
  return push(std::move(n));
}

Var Graph::constant(Matrix value) {
  Node n;
  n.kind = OpKind::kConstant;
  n.rows = value.rows();
  n.cols = value.cols();
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::gather_impl(const ParameterTensor& table, ParameterTensor* sink,
                       std::vector<std::size_t> rows) {
  if (rows.empty()) throw ConfigError("gather from '" + table.name + "': no rows");
  for (std::size_t r : rows) {
    if (r >= table.rows()) {
      throw ConfigError("gather from '" + table.name + "': row " + std::to_string(r) +
                        " out of range " + std::to_string(table.rows()));
    }
  }
  Node n;
  n.kind = OpKind::kGather;
  n.label = table.name;
  n.rows = rows.size();
  n.cols = table.cols();
  n.source = &table;
  n.sink = sink;
  n.indices = std::move(rows);
  return push(std::move(n));
}

Var Graph::gather(ParameterTensor& table, std::vector<std::size_t> rows) {
  return gather_impl(table, &table, std::move(rows));
}

Var Graph::gather(const ParameterTensor& table, std::vector<std::size_t> rows) {
  return gather_impl(table, nullptr, std::move(rows));
}

Var Graph::affine(Var x, Var weight, Var bias) {
  const Node& nx = node(x);
  const Node& nw = node(weight);
  if (nw.cols != nx.cols) {
    throw ConfigError("affine node #" + std::to_string(nodes_.size()) + ": input has " +
                      std::to_string(nx.cols) + " columns but weight '" + nw.label +
                      "' expects " + std::to_string(nw.cols));
  }
  Node n;
  n.kind = OpKind::kAffine;
  n.inputs = {x.id, weight.id};
  if (bias.valid()) {
    const Node& nb = node(bias);
    if (nb.rows != 1 || nb.cols != nw.rows) {
      throw ConfigError("affine node #" + std::to_string(nodes_.size()) + ": bias '" +
                        nb.label + "' must be 1x" + std::to_string(nw.rows));
    }
    n.inputs.push_back(bias.id);
  }
  n.rows = nx.rows;
  n.cols = nw.rows;
  return push(std::move(n));
}

Var Graph::matmul(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.cols != nb.rows) {
    throw ConfigError("matmul node #" + std::to_string(nodes_.size()) +
                      ": inner dimensions " + std::to_string(na.cols) + " vs " +
                      std::to_string(nb.rows));
  }
  Node n;
  n.kind = OpKind::kMatmul;
  n.inputs = {a.id, b.id};
  n.rows = na.rows;
  n.cols = nb.cols;
  return push(std::move(n));
}

Var Graph::matmul_nt(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.cols != nb.cols) {
    throw ConfigError("matmul_nt node #" + std::to_string(nodes_.size()) +
                      ": inner dimensions " + std::to_string(na.cols) + " vs " +
                      std::to_string(nb.cols));
  }
  Node n;
  n.kind = OpKind::kMatmulNT;
  n.inputs = {a.id, b.id};
  n.rows = na.rows;
  n.cols = nb.rows;
  return push(std::move(n));
}

Var Graph::concat(std::vector<Var> parts) {
  if (parts.empty()) throw ConfigError("concat of zero inputs");
  Node n;
  n.kind = OpKind::kConcat;
  n.rows = node(parts.front()).rows;
  for (Var p : parts) {
    const Node& np = node(p);
    if (np.rows != n.rows) {
      throw ConfigError("concat node #" + std::to_string(nodes_.size()) +
                        ": row count mismatch " + std::to_string(np.rows) + " vs " +
                        std::to_string(n.rows));
    }
    n.cols += np.cols;
    n.inputs.push_back(p.id);
  }
  return push(std::move(n));
}

Var Graph::hadamard(Var a, Var b) {
  check_same_shape("hadamard", a, b);
  Node n;
  n.kind = OpKind::kHadamard;
  n.inputs = {a.id, b.id};
  n.rows = node(a).rows;
  n.cols = node(a).cols;
  return push(std::move(n));
}

Var Graph::dot(Var a, Var b) {
  check_same_shape("dot", a, b);
  Node n;
  n.kind = OpKind::kDot;
  n.inputs = {a.id, b.id};
  n.rows = node(a).rows;
  n.cols = 1;
  return push(std::move(n));
}

Var Graph::bilinear(Var x, Var m, Var y) {
  const Node& nx = node(x);
  const Node& nm = node(m);
  const Node& ny = node(y);
  if (nx.cols != nm.rows || ny.cols != nm.cols || nx.rows != ny.rows) {
    throw ConfigError("bilinear node #" + std::to_string(nodes_.size()) + ": x " +
                      std::to_string(nx.rows) + "x" + std::to_string(nx.cols) + ", m " +
                      std::to_string(nm.rows) + "x" + std::to_string(nm.cols) + ", y " +
                      std::to_string(ny.rows) + "x" + std::to_string(ny.cols));
  }
  Node n;
  n.kind = OpKind::kBilinear;
  n.inputs = {x.id, m.id, y.id};
  n.rows = nx.rows;
  n.cols = 1;
  return push(std::move(n));
}

Var Graph::unary(OpKind kind, Var x) {
  const Node& nx = node(x);
  Node n;
  n.kind = kind;
  n.inputs = {x.id};
  n.rows = nx.rows;
  n.cols = nx.cols;
  return push(std::move(n));
}

Var Graph::sigmoid(Var x) { return unary(OpKind::kSigmoid, x); }
Var Graph::relu(Var x) { return unary(OpKind::kRelu, x); }
Var Graph::softmax(Var x) { return unary(OpKind::kSoftmax, x); }
Var Graph::max0(Var x) { return unary(OpKind::kMax0, x); }
Var Graph::log(Var x) { return unary(OpKind::kLog, x); }
Var Graph::normalize(Var x) { return unary(OpKind::kNormalize, x); }

Var Graph::add(Var a, Var b) {
  check_same_shape("add", a, b);
  Node n;
  n.kind = OpKind::kAdd;
  n.inputs = {a.id, b.id};
  n.rows = node(a).rows;
  n.cols = node(a).cols;
  return push(std::move(n));
}

Var Graph::scale(Var x, double factor) {
  Var out = unary(OpKind::kScale, x);
  nodes_[out.id].scalar = factor;
  return out;
}

Var Graph::shift(Var x, double offset) {
  Var out = unary(OpKind::kShift, x);
  nodes_[out.id].scalar = offset;
  return out;
}

Var Graph::sum(Var x) {
  Node n;
  n.kind = OpKind::kSum;
  n.inputs = {x.id};
  n.rows = 1;
  n.cols = 1;
  return push(std::move(n));
}

Var Graph::bce(Var prob, std::vector<double> labels) {
  const Node& np = node(prob);
  if (labels.size() != np.rows * np.cols) {
    throw ConfigError("bce node #" + std::to_string(nodes_.size()) + ": " +
                      std::to_string(labels.size()) + " labels for " +
                      std::to_string(np.rows * np.cols) + " probabilities");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw ConfigError("bce labels must be 0 or 1");
  }
  Var out = unary(OpKind::kBce, prob);
  nodes_[out.id].labels = std::move(labels);
  return out;
}

Var Graph::softmax_xent(Var logits, std::vector<std::size_t> labels) {
  const Node& nl = node(logits);
  if (labels.size() != nl.rows) {
    throw ConfigError("softmax_xent node #" + std::to_string(nodes_.size()) +
                      ": label count " + std::to_string(labels.size()) + " vs rows " +
                      std::to_string(nl.rows));
  }
  for (std::size_t l : labels) {
    if (l >= nl.cols) throw ConfigError("softmax_xent label out of range");
  }
  Node n;
  n.kind = OpKind::kSoftmaxXent;
  n.inputs = {logits.id};
  n.rows = nl.rows;
  n.cols = 1;
  n.indices = std::move(labels);
  return push(std::move(n));
}

Var Graph::select_rows(Var x, std::vector<std::size_t> rows) {
  const Node& nx = node(x);
  if (rows.empty()) throw ConfigError("select_rows with no rows");
  for (std::size_t r : rows) {
    if (r >= nx.rows) throw ConfigError("select_rows index out of range");
  }
  Node n;
  n.kind = OpKind::kSelectRows;
  n.inputs = {x.id};
  n.rows = rows.size();
  n.cols = nx.cols;
  n.indices = std::move(rows);
  return push(std::move(n));
}

Var Graph::broadcast_cols(Var column, std::size_t count) {
  const Node& nc = node(column);
  if (nc.cols != 1 || count == 0) {
    throw ConfigError("broadcast_cols expects a column vector and a positive count");
  }
  Node n;
  n.kind = OpKind::kBroadcastCols;
  n.inputs = {column.id};
  n.rows = nc.rows;
  n.cols = count;
  return push(std::move(n));
}

Var Graph::custom(std::string name, std::vector<Var> inputs, std::size_t rows,
                  std::size_t cols, CustomForward forward, CustomBackward backward) {
  Node n;
  n.kind = OpKind::kCustom;
  n.label = std::move(name);
  for (Var v : inputs) {
    node(v);
    n.inputs.push_back(v.id);
  }
  n.rows = rows;
  n.cols = cols;
  n.custom_forward = std::move(forward);
  n.custom_backward = std::move(backward);
  return push(std::move(n));
}

// ---------------------------------------------------------------------------
// Forward

void Graph::forward() {
  for (Node& n : nodes_) {
    forward_node(n);
    if (!n.value.all_finite()) {
      throw NumericError("non-finite output in " +
                         describe(static_cast<std::uint32_t>(&n - nodes_.data())));
    }
  }
  forwarded_ = true;
}

void Graph::forward_node(Node& n) {
  if (n.kind == OpKind::kConstant) return;
  if (n.value.rows() != n.rows || n.value.cols() != n.cols) {
    n.value = Matrix(n.rows, n.cols);
  }
  Matrix& out = n.value;
  auto in = [&](std::size_t i) -> const Matrix& { return nodes_[n.inputs[i]].value; };

  switch (n.kind) {
    case OpKind::kConstant:
      break;
    case OpKind::kParameter:
      std::copy(n.source->values.begin(), n.source->values.end(), out.data());
      break;
    case OpKind::kGather:
      for (std::size_t r = 0; r < n.indices.size(); ++r) {
        auto src = n.source->row(n.indices[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
      }
      break;
    case OpKind::kAffine: {
      as_eigen(out).noalias() = as_eigen(in(0)) * as_eigen(in(1)).transpose();
      if (n.inputs.size() == 3) {
        const Matrix& b = in(2);
        for (std::size_t r = 0; r < out.rows(); ++r) {
          auto row = out.row(r);
          for (std::size_t c = 0; c < out.cols(); ++c) row[c] += b(0, c);
        }
      }
      break;
    }
    case OpKind::kMatmul:
      as_eigen(out).noalias() = as_eigen(in(0)) * as_eigen(in(1));
      break;
    case OpKind::kMatmulNT:
      as_eigen(out).noalias() = as_eigen(in(0)) * as_eigen(in(1)).transpose();
      break;
    case OpKind::kConcat: {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        const Matrix& part = in(i);
        for (std::size_t r = 0; r < out.rows(); ++r) {
          auto src = part.row(r);
          std::copy(src.begin(), src.end(), out.row(r).begin() + offset);
        }
        offset += part.cols();
      }
      break;
    }
    case OpKind::kHadamard: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
      break;
    }
    case OpKind::kDot: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double acc = 0.0;
        auto ra = a.row(r);
        auto rb = b.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c) acc += ra[c] * rb[c];
        out(r, 0) = acc;
      }
      break;
    }
    case OpKind::kBilinear: {
      const Matrix& x = in(0);
      const Matrix& m = in(1);
      const Matrix& y = in(2);
      n.cache = Matrix(x.rows(), m.cols());
      as_eigen(n.cache).noalias() = as_eigen(x) * as_eigen(m);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        double acc = 0.0;
        auto t = n.cache.row(r);
        auto ry = y.row(r);
        for (std::size_t c = 0; c < y.cols(); ++c) acc += t[c] * ry[c];
        out(r, 0) = acc;
      }
      break;
    }
    case OpKind::kSigmoid: {
      const Matrix& x = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = stable_sigmoid(x.data()[i]);
      break;
    }
    case OpKind::kRelu:
    case OpKind::kMax0: {
      const Matrix& x = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
      }
      break;
    }
    case OpKind::kSoftmax: {
      const Matrix& x = in(0);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        auto dst = out.row(r);
        const double mx = *std::max_element(src.begin(), src.end());
        double z = 0.0;
        for (std::size_t c = 0; c < src.size(); ++c) {
          dst[c] = std::exp(src[c] - mx);
          z += dst[c];
        }
        for (double& d : dst) d /= z;
      }
      break;
    }
    case OpKind::kAdd: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
      break;
    }
    case OpKind::kScale: {
      const Matrix& x = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = n.scalar * x.data()[i];
      break;
    }
    case OpKind::kShift: {
      const Matrix& x = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = x.data()[i] + n.scalar;
      break;
    }
    case OpKind::kSum: {
      const Matrix& x = in(0);
      double acc = 0.0;
      for (double v : x.values()) acc += v;
      out(0, 0) = acc;
      break;
    }
    case OpKind::kLog: {
      const Matrix& x = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::log(x.data()[i]);
      break;
    }
    case OpKind::kBce: {
      const Matrix& p = in(0);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double c = std::clamp(p.data()[i], kProbClamp, 1.0 - kProbClamp);
        const double y = n.labels[i];
        out.data()[i] = -(y * std::log(c) + (1.0 - y) * std::log(1.0 - c));
      }
      break;
    }
    case OpKind::kSoftmaxXent: {
      const Matrix& x = in(0);
      n.cache = Matrix(x.rows(), x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        auto prob = n.cache.row(r);
        const double mx = *std::max_element(src.begin(), src.end());
        double z = 0.0;
        for (std::size_t c = 0; c < src.size(); ++c) {
          prob[c] = std::exp(src[c] - mx);
          z += prob[c];
        }
        for (double& p : prob) p /= z;
        out(r, 0) = (mx + std::log(z)) - src[n.indices[r]];
      }
      break;
    }
    case OpKind::kNormalize: {
      const Matrix& x = in(0);
      n.cache = Matrix(x.rows(), 1);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        double sq = 0.0;
        for (double v : src) sq += v * v;
        const double norm = std::sqrt(sq);
        n.cache(r, 0) = norm;
        const double denom = norm + kNormGuard;
        auto dst = out.row(r);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / denom;
      }
      break;
    }
    case OpKind::kSelectRows: {
      const Matrix& x = in(0);
      for (std::size_t r = 0; r < n.indices.size(); ++r) {
        auto src = x.row(n.indices[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
      }
      break;
    }
    case OpKind::kBroadcastCols: {
      const Matrix& x = in(0);
      for (std::size_t r = 0; r < out.rows(); ++r) {
        auto dst = out.row(r);
        std::fill(dst.begin(), dst.end(), x(r, 0));
      }
      break;
    }
    case OpKind::kCustom: {
      std::vector<const Matrix*> inputs;
      for (std::uint32_t id : n.inputs) inputs.push_back(&nodes_[id].value);
      n.custom_forward(inputs, out);
      if (out.rows() != n.rows || out.cols() != n.cols) {
        throw ConfigError("custom op '" + n.label + "' produced wrong shape");
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Backward

void Graph::backward(Var root) {
  if (!forwarded_) throw UsageError("backward() called before forward()");
  const Node& r = node(root);
  if (r.rows != 1 || r.cols != 1) {
    throw UsageError("backward() root must be scalar, got " + std::to_string(r.rows) +
                     "x" + std::to_string(r.cols));
  }
  for (std::size_t i = 0; i <= root.id; ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad) {
      if (n.grad.rows() != n.rows || n.grad.cols() != n.cols) {
        n.grad = Matrix(n.rows, n.cols);
      } else {
        n.grad.fill(0.0);
      }
    }
  }
  // A root that depends on no parameter has nothing to propagate.
  if (!nodes_[root.id].requires_grad) return;
  nodes_[root.id].grad(0, 0) = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad) backward_node(n);
  }
}

void Graph::backward_node(Node& n) {
  const Matrix& g = n.grad;
  auto in = [&](std::size_t i) -> const Matrix& { return nodes_[n.inputs[i]].value; };
  // Gradient buffer of input i, or nullptr when that input needs no gradient.
  auto gin = [&](std::size_t i) -> Matrix* {
    Node& src = nodes_[n.inputs[i]];
    return src.requires_grad ? &src.grad : nullptr;
  };

  switch (n.kind) {
    case OpKind::kConstant:
      break;
    case OpKind::kParameter:
      if (n.sink != nullptr) {
        auto& dst = n.sink->grad;
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g.data()[i];
      }
      break;
    case OpKind::kGather:
      if (n.sink != nullptr) {
        const std::size_t cols = n.cols;
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
          double* dst = n.sink->grad.data() + n.indices[r] * cols;
          auto src = g.row(r);
          for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
        }
      }
      break;
    case OpKind::kAffine: {
      if (Matrix* dx = gin(0)) as_eigen(*dx).noalias() += as_eigen(g) * as_eigen(in(1));
      if (Matrix* dw = gin(1)) {
        as_eigen(*dw).noalias() += as_eigen(g).transpose() * as_eigen(in(0));
      }
      if (n.inputs.size() == 3) {
        if (Matrix* db = gin(2)) {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            auto row = g.row(r);
            for (std::size_t c = 0; c < g.cols(); ++c) (*db)(0, c) += row[c];
          }
        }
      }
      break;
    }
    case OpKind::kMatmul:
      if (Matrix* da = gin(0)) {
        as_eigen(*da).noalias() += as_eigen(g) * as_eigen(in(1)).transpose();
      }
      if (Matrix* db = gin(1)) {
        as_eigen(*db).noalias() += as_eigen(in(0)).transpose() * as_eigen(g);
      }
      break;
    case OpKind::kMatmulNT:
      if (Matrix* da = gin(0)) as_eigen(*da).noalias() += as_eigen(g) * as_eigen(in(1));
      if (Matrix* db = gin(1)) {
        as_eigen(*db).noalias() += as_eigen(g).transpose() * as_eigen(in(0));
      }
      break;
    case OpKind::kConcat: {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        const std::size_t w = nodes_[n.inputs[i]].cols;
        if (Matrix* d = gin(i)) {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            auto src = g.row(r);
            auto dst = d->row(r);
            for (std::size_t c = 0; c < w; ++c) dst[c] += src[offset + c];
          }
        }
        offset += w;
      }
      break;
    }
    case OpKind::kHadamard: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      if (Matrix* da = gin(0)) {
        for (std::size_t i = 0; i < g.size(); ++i) da->data()[i] += g.data()[i] * b.data()[i];
      }
      if (Matrix* db = gin(1)) {
        for (std::size_t i = 0; i < g.size(); ++i) db->data()[i] += g.data()[i] * a.data()[i];
      }
      break;
    }
    case OpKind::kDot: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      Matrix* da = gin(0);
      Matrix* db = gin(1);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const double gr = g(r, 0);
        for (std::size_t c = 0; c < a.cols(); ++c) {
          if (da) (*da)(r, c) += gr * b(r, c);
          if (db) (*db)(r, c) += gr * a(r, c);
        }
      }
      break;
    }
    case OpKind::kBilinear: {
      const Matrix& x = in(0);
      const Matrix& m = in(1);
      const Matrix& y = in(2);
      // gy = diag(g) * (x M); scaled y feeds both dx and dM.
      Matrix gy(y.rows(), y.cols());
      for (std::size_t r = 0; r < y.rows(); ++r) {
        for (std::size_t c = 0; c < y.cols(); ++c) gy(r, c) = g(r, 0) * y(r, c);
      }
      if (Matrix* dx = gin(0)) as_eigen(*dx).noalias() += as_eigen(gy) * as_eigen(m).transpose();
      if (Matrix* dm = gin(1)) as_eigen(*dm).noalias() += as_eigen(x).transpose() * as_eigen(gy);
      if (Matrix* dy = gin(2)) {
        for (std::size_t r = 0; r < y.rows(); ++r) {
          for (std::size_t c = 0; c < y.cols(); ++c) (*dy)(r, c) += g(r, 0) * n.cache(r, c);
        }
      }
      break;
    }
    case OpKind::kSigmoid:
      if (Matrix* dx = gin(0)) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double s = n.value.data()[i];
          dx->data()[i] += g.data()[i] * s * (1.0 - s);
        }
      }
      break;
    case OpKind::kRelu:
    case OpKind::kMax0:
      if (Matrix* dx = gin(0)) {
        const Matrix& x = in(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x.data()[i] > 0.0) dx->data()[i] += g.data()[i];
        }
      }
      break;
    case OpKind::kSoftmax:
      if (Matrix* dx = gin(0)) {
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto s = n.value.row(r);
          auto gr = g.row(r);
          double inner = 0.0;
          for (std::size_t c = 0; c < s.size(); ++c) inner += gr[c] * s[c];
          auto dst = dx->row(r);
          for (std::size_t c = 0; c < s.size(); ++c) dst[c] += s[c] * (gr[c] - inner);
        }
      }
      break;
    case OpKind::kAdd:
      for (std::size_t k = 0; k < 2; ++k) {
        if (Matrix* d = gin(k)) {
          for (std::size_t i = 0; i < g.size(); ++i) d->data()[i] += g.data()[i];
        }
      }
      break;
    case OpKind::kScale:
      if (Matrix* dx = gin(0)) {
        for (std::size_t i = 0; i < g.size(); ++i) dx->data()[i] += n.scalar * g.data()[i];
      }
      break;
    case OpKind::kShift:
      if (Matrix* dx = gin(0)) {
        for (std::size_t i = 0; i < g.size(); ++i) dx->data()[i] += g.data()[i];
      }
      break;
    case OpKind::kSum:
      if (Matrix* dx = gin(0)) {
        const double g0 = g(0, 0);
        for (double& d : dx->values()) d += g0;
      }
      break;
    case OpKind::kLog:
      if (Matrix* dx = gin(0)) {
        const Matrix& x = in(0);
        for (std::size_t i = 0; i < g.size(); ++i) dx->data()[i] += g.data()[i] / x.data()[i];
      }
      break;
    case OpKind::kBce:
      if (Matrix* dp = gin(0)) {
        const Matrix& p = in(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double pi = p.data()[i];
          if (pi < kProbClamp || pi > 1.0 - kProbClamp) continue;  // clamp is flat
          const double y = n.labels[i];
          dp->data()[i] += g.data()[i] * (-y / pi + (1.0 - y) / (1.0 - pi));
        }
      }
      break;
    case OpKind::kSoftmaxXent:
      if (Matrix* dx = gin(0)) {
        for (std::size_t r = 0; r < n.rows; ++r) {
          const double gr = g(r, 0);
          auto prob = n.cache.row(r);
          auto dst = dx->row(r);
          for (std::size_t c = 0; c < prob.size(); ++c) dst[c] += gr * prob[c];
          dst[n.indices[r]] -= gr;
        }
      }
      break;
    case OpKind::kNormalize:
      if (Matrix* dx = gin(0)) {
        const Matrix& x = in(0);
        for (std::size_t r = 0; r < x.rows(); ++r) {
          const double norm = n.cache(r, 0);
          const double denom = norm + kNormGuard;
          auto xr = x.row(r);
          auto gr = g.row(r);
          auto dst = dx->row(r);
          double xg = 0.0;
          for (std::size_t c = 0; c < xr.size(); ++c) xg += xr[c] * gr[c];
          const double radial = norm > 0.0 ? xg / (denom * denom * norm) : 0.0;
          for (std::size_t c = 0; c < xr.size(); ++c) {
            dst[c] += gr[c] / denom - radial * xr[c];
          }
        }
      }
      break;
    case OpKind::kSelectRows:
      if (Matrix* dx = gin(0)) {
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
          auto src = g.row(r);
          auto dst = dx->row(n.indices[r]);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
      }
      break;
    case OpKind::kBroadcastCols:
      if (Matrix* dx = gin(0)) {
        for (std::size_t r = 0; r < g.rows(); ++r) {
          double acc = 0.0;
          for (double v : g.row(r)) acc += v;
          (*dx)(r, 0) += acc;
        }
      }
      break;
    case OpKind::kCustom: {
      std::vector<const Matrix*> inputs;
      std::vector<Matrix*> grads;
      std::vector<Matrix> scratch_buffers(n.inputs.size());
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        Node& src = nodes_[n.inputs[i]];
        inputs.push_back(&src.value);
        if (src.requires_grad) {
          grads.push_back(&src.grad);
        } else {
          scratch_buffers[i] = Matrix(src.rows, src.cols);
          grads.push_back(&scratch_buffers[i]);
        }
      }
      n.custom_backward(inputs, n.value, g, grads);
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Accessors

const Matrix& Graph::value(Var v) const {
  const Node& n = node(v);
  if (!forwarded_ && n.kind != OpKind::kConstant) {
    throw UsageError("value() read before forward()");
  }
  return n.value;
}

const Matrix& Graph::grad(Var v) const {
  const Node& n = node(v);
  if (!n.requires_grad) throw UsageError("node does not carry a gradient");
  return n.grad;
}

double Graph::scalar(Var v) const {
  const Matrix& m = value(v);
  if (m.rows() != 1 || m.cols() != 1) throw UsageError("scalar() on non-scalar node");
  return m(0, 0);
}

OpKind Graph::kind(Var v) const { return node(v).kind; }

}  // namespace dbrec::engine
