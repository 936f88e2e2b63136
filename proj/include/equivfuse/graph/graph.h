#pragma once

#include "equivfuse/hir/ast.h"

#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::graph {

struct TensorDecl {
  std::string name;
  std::vector<unsigned> shape;  // empty for a scalar
  hir::Signedness sign = hir::Signedness::Signed;
  unsigned width = 32;

  unsigned elements() const;
  hir::HirType hirType() const;
};

enum class GraphOp { Dot, Matmul, EwAdd, EwMul, ReduceSum };

std::string_view graphOpName(GraphOp op);

struct GraphNode {
  GraphOp op = GraphOp::Dot;
  std::vector<std::string> args;
  std::string result;
};

/// A tensor dataflow graph. Nodes are in topological order and every tensor
/// is assigned at most once.
struct GraphSpec {
  std::string name;  // optional "name" key
  std::vector<TensorDecl> tensors;
  std::vector<GraphNode> nodes;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const TensorDecl &tensor(const std::string &name) const;
};

/// Parses and validates the JSON form:
///   {"name": "dot",
///    "tensors": [{"name": "a", "shape": [2], "dtype": "s8"}, ...],
///    "nodes": [{"op": "dot", "args": ["a", "b"], "result": "out"}],
///    "inputs": ["a", "b"], "outputs": ["out"]}
/// dtype is `s<N>` or `u<N>` with N in 1..64.
GraphSpec parseGraph(std::string_view json, std::string_view fileName = {});

/// Emits one HIR function whose in/out params are the graph inputs and
/// outputs (flattened row-major). Products are formed at the sum of the
/// operand widths, then truncated or extended to the result width.
/// An output that is also an input is copied to a param named `<name>_out`.
hir::HirFunction lowerGraphToHir(const GraphSpec &g, const std::string &functionName);

} // namespace equivfuse::graph
