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

#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dbrec/engine/matrix.hpp"
#include "dbrec/engine/parameter.hpp"

namespace dbrec::engine {

enum class OpKind {
  kParameter,
  kConstant,
  kGather,
  kAffine,
  kMatmul,
  kMatmulNT,
  kConcat,
  kHadamard,
  kDot,
  kBilinear,
  kSigmoid,
  kRelu,
  kSoftmax,
  kAdd,
  kScale,
  kShift,
  kSum,
  kMax0,
  kLog,
  kBce,
  kSoftmaxXent,
  kNormalize,
  kSelectRows,
  kBroadcastCols,
  kCustom,
};

const char* op_name(OpKind kind);

// Handle to a node inside one Graph.
struct Var {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Define-by-run computation graph over dense matrices.
//
// Nodes are appended in construction order and every node only refers to
// earlier nodes, so the graph is acyclic and construction order is a
// topological order. Shapes are checked while the graph is built; values are
// computed by forward() and gradients by backward().
//
// Parameters added through a non-const reference are gradient sinks: backward
// adds d(root)/d(tensor) onto ParameterTensor::grad. Parameters added through a
// const reference are read-only inputs and never receive gradients.
class Graph {
 public:
  using CustomForward =
      std::function<void(std::span<const Matrix* const> inputs, Matrix& out)>;
  using CustomBackward = std::function<void(
      std::span<const Matrix* const> inputs, const Matrix& out,
      const Matrix& grad_out, std::span<Matrix* const> grad_inputs)>;

  Var parameter(ParameterTensor& tensor);
  Var parameter(const ParameterTensor& tensor);
  Var constant(Matrix value);

  // Rows of an embedding table; backward scatters only into these rows.
  Var gather(ParameterTensor& table, std::vector<std::size_t> rows);
  Var gather(const ParameterTensor& table, std::vector<std::size_t> rows);

  // x (B x in) * weight^T (weight is out x in) + bias (1 x out, optional).
  Var affine(Var x, Var weight, Var bias = {});
  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var concat(std::vector<Var> parts);  // column-wise
  Var hadamard(Var a, Var b);
  Var dot(Var a, Var b);  // row-wise inner product, B x 1
  // Row-wise x_r^T * m * y_r, B x 1.
  Var bilinear(Var x, Var m, Var y);
  Var sigmoid(Var x);
  Var relu(Var x);
  Var softmax(Var x);  // row-wise
  Var add(Var a, Var b);
  Var scale(Var x, double factor);
  Var shift(Var x, double offset);
  Var sum(Var x);  // 1 x 1
  Var max0(Var x);
  Var log(Var x);
  // Element-wise binary cross-entropy of probabilities against 0/1 labels.
  // Probabilities are clamped to [1e-12, 1 - 1e-12] before the log.
  Var bce(Var prob, std::vector<double> labels);
  // Row-wise -log softmax(logits)[label], computed stably. B x 1.
  Var softmax_xent(Var logits, std::vector<std::size_t> labels);
  // Row-wise x / (||x|| + 1e-12).
  Var normalize(Var x);
  Var select_rows(Var x, std::vector<std::size_t> rows);
  // B x 1 column repeated into B x n.
  Var broadcast_cols(Var column, std::size_t n);

  Var custom(std::string name, std::vector<Var> inputs, std::size_t rows,
             std::size_t cols, CustomForward forward, CustomBackward backward);

  // Computes every node in construction order. Throws NumericError naming the
  // first node whose output is not finite.
  void forward();

  // Reverse-mode sweep from a scalar root. Requires forward() first.
  void backward(Var root);

  const Matrix& value(Var v) const;
  const Matrix& grad(Var v) const;
  double scalar(Var v) const;

  OpKind kind(Var v) const;
  std::size_t rows(Var v) const { return node(v).rows; }
  std::size_t cols(Var v) const { return node(v).cols; }
  std::size_t num_nodes() const { return nodes_.size(); }
  bool forwarded() const { return forwarded_; }

 private:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::string label;
    std::vector<std::uint32_t> inputs;
    std::size_t rows = 0;
    std::size_t cols = 0;
    const ParameterTensor* source = nullptr;
    ParameterTensor* sink = nullptr;
    std::vector<std::size_t> indices;
    std::vector<double> labels;
    double scalar = 0.0;
    bool requires_grad = false;
    Matrix value;
    Matrix grad;
    Matrix cache;
    CustomForward custom_forward;
    CustomBackward custom_backward;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  std::string describe(std::uint32_t id) const;
  void check_same_shape(const char* op, Var a, Var b) const;
  Var gather_impl(const ParameterTensor& table, ParameterTensor* sink,
                  std::vector<std::size_t> rows);
  Var unary(OpKind kind, Var x);

  void forward_node(Node& n);
  void backward_node(Node& n);

  std::vector<Node> nodes_;
  bool forwarded_ = false;
};

}  // namespace dbrec::engine
