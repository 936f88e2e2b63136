#pragma once

#include "equivfuse/support/bitvec.h"

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace equivfuse::core {

/// Word-level operations. Shifts take an amount of the same width and follow
/// SMT-LIB semantics (amount >= width gives zero, or the sign fill).
enum class Op : uint8_t {
  Const, Input, Reg,
  Add, Sub, Mul, And, Or, Xor, Not,
  Shl, Lshr, Ashr,
  Eq, Ult, Slt, Ule, Sle,
  Mux, Concat, Extract, Zext, Sext,
};

std::string_view opName(Op op);
std::optional<Op> opFromName(std::string_view name);

using NodeId = uint32_t;
using Args = boost::container::small_vector<NodeId, 3>;

struct Node {
  Op op = Op::Const;
  unsigned width = 1;
  Args args;
  /// Input: port index. Reg: register index. Extract: low bit.
  unsigned aux = 0;
  /// Const only.
  BitVec value;
};

enum class PortDir { In, Out };

struct Port {
  std::string name;
  unsigned width = 1;
  PortDir dir = PortDir::In;
  /// In: its Input node. Out: the driving node.
  NodeId node = 0;
};

struct Register {
  std::string name;
  unsigned width = 1;
  BitVec init;
  NodeId node = 0;  // the Reg node
  NodeId next = 0;
};

/// SSA dataflow graph with typed ports and clocked registers. Operands of a
/// node always precede it; only register `next` edges may point forward.
struct CoreModule {
  std::string name;
  std::vector<Port> ports;
  std::vector<Node> nodes;
  std::vector<Register> registers;

  bool isCombinational() const { return registers.empty(); }
  std::vector<unsigned> inputPorts() const;
  std::vector<unsigned> outputPorts() const;
  std::optional<unsigned> findPort(std::string_view name) const;
  unsigned inputBits() const;

  /// Throws InvalidModule when an SSA or width rule is broken.
  void validate() const;
};

/// Result width of `op` applied to operands of the given widths; throws
/// InvalidModule on a width rule violation.
unsigned resultWidth(Op op, const std::vector<unsigned> &argWidths, unsigned aux, unsigned width);

/// Evaluates one non-leaf node.
BitVec evalNode(const Node &n, const BitVec *args);

/// Incremental construction with local simplification and structural
/// hashing (both on by default).
class ModuleBuilder {
 public:
  explicit ModuleBuilder(std::string name, bool simplify = true);

  NodeId constant(const BitVec &value);
  NodeId constant(unsigned width, uint64_t value) { return constant(BitVec(width, value)); }
  NodeId input(const std::string &name, unsigned width);
  NodeId reg(const std::string &name, unsigned width, const BitVec &init);
  void setNext(NodeId regNode, NodeId next);
  void output(const std::string &name, NodeId driver);

  /// Generic entry point; `aux` is the low bit for Extract and `width` the
  /// target for Extract/Zext/Sext (ignored otherwise).
  NodeId op(Op op, const Args &args, unsigned aux = 0, unsigned width = 0);

  NodeId add(NodeId a, NodeId b) { return op(Op::Add, {a, b}); }
  NodeId sub(NodeId a, NodeId b) { return op(Op::Sub, {a, b}); }
  NodeId mul(NodeId a, NodeId b) { return op(Op::Mul, {a, b}); }
  NodeId bitAnd(NodeId a, NodeId b) { return op(Op::And, {a, b}); }
  NodeId bitOr(NodeId a, NodeId b) { return op(Op::Or, {a, b}); }
  NodeId bitXor(NodeId a, NodeId b) { return op(Op::Xor, {a, b}); }
  NodeId bitNot(NodeId a) { return op(Op::Not, {a}); }
  NodeId eq(NodeId a, NodeId b) { return op(Op::Eq, {a, b}); }
  NodeId ne(NodeId a, NodeId b) { return bitNot(eq(a, b)); }
  NodeId ult(NodeId a, NodeId b) { return op(Op::Ult, {a, b}); }
  NodeId ule(NodeId a, NodeId b) { return op(Op::Ule, {a, b}); }
  NodeId slt(NodeId a, NodeId b) { return op(Op::Slt, {a, b}); }
  NodeId sle(NodeId a, NodeId b) { return op(Op::Sle, {a, b}); }
  NodeId mux(NodeId sel, NodeId then, NodeId otherwise) { return op(Op::Mux, {sel, then, otherwise}); }
  NodeId concat(NodeId hi, NodeId lo) { return op(Op::Concat, {hi, lo}); }
  /// Concatenation with element 0 at the least significant bits.
  NodeId concatLsbFirst(const std::vector<NodeId> &parts);
  NodeId extract(NodeId a, unsigned hi, unsigned lo) { return op(Op::Extract, {a}, lo, hi - lo + 1); }
  NodeId zext(NodeId a, unsigned width) { return op(Op::Zext, {a}, 0, width); }
  NodeId sext(NodeId a, unsigned width) { return op(Op::Sext, {a}, 0, width); }
  /// Truncates or extends to `width`.
  NodeId resize(NodeId a, unsigned width, bool isSigned);
  /// 1 when `a` is nonzero.
  NodeId reduceOr(NodeId a);
  /// `a` mod `m` for a constant `m`, at the width of `a`.
  NodeId modConst(NodeId a, uint64_t m);

  unsigned width(NodeId n) const { return m_.nodes[n].width; }
  const Node &node(NodeId n) const { return m_.nodes[n]; }
  std::optional<BitVec> constValue(NodeId n) const;
  std::size_t size() const { return m_.nodes.size(); }

  CoreModule finish();

 private:
  NodeId push(Node n);
  std::optional<NodeId> simplify(Op op, const Args &args, unsigned aux, unsigned width);

  CoreModule m_;
  bool simplify_;
  std::unordered_map<std::string, NodeId> strash_;
};

} // namespace equivfuse::core
