#include "equivfuse/core/module.h"

#include "equivfuse/support/error.h"

#include <algorithm>
#include <array>

namespace equivfuse::core {

namespace {

constexpr std::array<std::string_view, 23> kOpNames = {
    "const", "input", "reg", "add", "sub", "mul", "and", "or", "xor", "not", "shl", "lshr",
    "ashr", "eq", "ult", "slt", "ule", "sle", "mux", "concat", "extract", "zext", "sext",
};

[[noreturn]] void invalid(const std::string &msg) { fail(ErrorKind::InvalidModule, msg); }

bool isCommutative(Op op) {
  return op == Op::Add || op == Op::Mul || op == Op::And || op == Op::Or || op == Op::Xor ||
         op == Op::Eq;
}

unsigned log2Exact(uint64_t m) {
  unsigned k = 0;
  while ((uint64_t{1} << k) < m)
    ++k;
  return k;
}

} // namespace

std::string_view opName(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> opFromName(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i)
    if (kOpNames[i] == name)
      return static_cast<Op>(i);
  return std::nullopt;
}

std::vector<unsigned> CoreModule::inputPorts() const {
  std::vector<unsigned> r;
  for (unsigned i = 0; i < ports.size(); ++i)
    if (ports[i].dir == PortDir::In)
      r.push_back(i);
  return r;
}

std::vector<unsigned> CoreModule::outputPorts() const {
  std::vector<unsigned> r;
  for (unsigned i = 0; i < ports.size(); ++i)
    if (ports[i].dir == PortDir::Out)
      r.push_back(i);
  return r;
}

std::optional<unsigned> CoreModule::findPort(std::string_view portName) const {
  for (unsigned i = 0; i < ports.size(); ++i)
    if (ports[i].name == portName)
      return i;
  return std::nullopt;
}

unsigned CoreModule::inputBits() const {
  unsigned n = 0;
  for (const auto &p : ports)
    if (p.dir == PortDir::In)
      n += p.width;
  return n;
}

unsigned resultWidth(Op op, const std::vector<unsigned> &w, unsigned aux, unsigned width) {
  auto arity = [&](std::size_t n) {
    if (w.size() != n)
      invalid(std::string(opName(op)) + " takes " + std::to_string(n) + " operands, got " +
              std::to_string(w.size()));
  };
  auto same = [&] {
    if (w[0] != w[1])
      invalid(std::string(opName(op)) + " operand widths differ: " + std::to_string(w[0]) +
              " vs " + std::to_string(w[1]));
  };
  switch (op) {
  case Op::Const:
  case Op::Input:
  case Op::Reg:
    arity(0);
    return width;
  case Op::Not:
    arity(1);
    return w[0];
  case Op::Add: case Op::Sub: case Op::Mul: case Op::And: case Op::Or: case Op::Xor:
  case Op::Shl: case Op::Lshr: case Op::Ashr:
    arity(2);
    same();
    return w[0];
  case Op::Eq: case Op::Ult: case Op::Slt: case Op::Ule: case Op::Sle:
    arity(2);
    same();
    return 1;
  case Op::Mux:
    arity(3);
    if (w[0] != 1)
      invalid("mux selector must be 1 bit, got " + std::to_string(w[0]));
    if (w[1] != w[2])
      invalid("mux arm widths differ: " + std::to_string(w[1]) + " vs " + std::to_string(w[2]));
    return w[1];
  case Op::Concat:
    arity(2);
    return w[0] + w[1];
  case Op::Extract:
    arity(1);
    if (width == 0 || aux + width > w[0])
      invalid("extract [" + std::to_string(aux + width - 1) + ":" + std::to_string(aux) +
              "] out of range for width " + std::to_string(w[0]));
    return width;
  case Op::Zext:
  case Op::Sext:
    arity(1);
    if (width < w[0])
      invalid(std::string(opName(op)) + " narrows " + std::to_string(w[0]) + " to " +
              std::to_string(width));
    return width;
  }
  invalid("bad op");
}

BitVec evalNode(const Node &n, const BitVec *a) {
  switch (n.op) {
  case Op::Const: return n.value;
  case Op::Input:
  case Op::Reg: invalid("leaf node has no operator semantics");
  case Op::Add: return a[0] + a[1];
  case Op::Sub: return a[0] - a[1];
  case Op::Mul: return a[0] * a[1];
  case Op::And: return a[0] & a[1];
  case Op::Or: return a[0] | a[1];
  case Op::Xor: return a[0] ^ a[1];
  case Op::Not: return ~a[0];
  case Op::Shl: return a[0].shl(a[1]);
  case Op::Lshr: return a[0].lshr(a[1]);
  case Op::Ashr: return a[0].ashr(a[1]);
  case Op::Eq: return BitVec(1, a[0] == a[1]);
  case Op::Ult: return BitVec(1, a[0].ult(a[1]));
  case Op::Slt: return BitVec(1, a[0].slt(a[1]));
  case Op::Ule: return BitVec(1, a[0].ule(a[1]));
  case Op::Sle: return BitVec(1, a[0].sle(a[1]));
  case Op::Mux: return a[0].isZero() ? a[2] : a[1];
  case Op::Concat: return BitVec::concat(a[0], a[1]);
  case Op::Extract: return a[0].extract(n.aux + n.width - 1, n.aux);
  case Op::Zext: return a[0].zext(n.width);
  case Op::Sext: return a[0].sext(n.width);
  }
  invalid("bad op");
}

void CoreModule::validate() const {
  std::vector<unsigned> widths;
  for (NodeId i = 0; i < nodes.size(); ++i) {
    const Node &n = nodes[i];
    widths.clear();
    for (NodeId a : n.args) {
      if (a >= i)
        invalid("node %" + std::to_string(i) + " uses later node %" + std::to_string(a));
      widths.push_back(nodes[a].width);
    }
    if (resultWidth(n.op, widths, n.aux, n.width) != n.width)
      invalid("node %" + std::to_string(i) + " has inconsistent width " + std::to_string(n.width));
    if (n.width == 0)
      invalid("node %" + std::to_string(i) + " has width 0");
    if (n.op == Op::Const && n.value.width() != n.width)
      invalid("constant %" + std::to_string(i) + " width mismatch");
    if (n.op == Op::Input && (n.aux >= ports.size() || ports[n.aux].dir != PortDir::In ||
                              ports[n.aux].node != i || ports[n.aux].width != n.width))
      invalid("input node %" + std::to_string(i) + " does not match its port");
    if (n.op == Op::Reg && (n.aux >= registers.size() || registers[n.aux].node != i ||
                            registers[n.aux].width != n.width))
      invalid("register node %" + std::to_string(i) + " does not match its register");
  }
  for (const auto &p : ports) {
    if (p.node >= nodes.size())
      invalid("port " + p.name + " refers to a missing node");
    if (nodes[p.node].width != p.width)
      invalid("port " + p.name + " width " + std::to_string(p.width) + " driven by width " +
              std::to_string(nodes[p.node].width));
    if (p.dir == PortDir::In && nodes[p.node].op != Op::Input)
      invalid("input port " + p.name + " is not bound to an input node");
  }
  for (std::size_t i = 0; i < ports.size(); ++i)
    for (std::size_t j = i + 1; j < ports.size(); ++j)
      if (ports[i].name == ports[j].name)
        invalid("duplicate port " + ports[i].name);
  for (const auto &r : registers) {
    if (r.next >= nodes.size() || nodes[r.next].width != r.width || r.init.width() != r.width)
      invalid("register " + r.name + " has an inconsistent next or init");
  }
}

// ---- builder ------------------------------------------------------------------

ModuleBuilder::ModuleBuilder(std::string name, bool simplify) : simplify_(simplify) {
  m_.name = std::move(name);
}

NodeId ModuleBuilder::push(Node n) {
  std::string key;
  const bool hashable = simplify_ && n.op != Op::Input && n.op != Op::Reg;
  if (hashable) {
    key.reserve(32);
    key += static_cast<char>(n.op);
    key += std::to_string(n.width) + ":" + std::to_string(n.aux);
    for (NodeId a : n.args)
      key += "," + std::to_string(a);
    if (n.op == Op::Const)
      key += "=" + n.value.toHex();
    auto it = strash_.find(key);
    if (it != strash_.end())
      return it->second;
  }
  NodeId id = static_cast<NodeId>(m_.nodes.size());
  m_.nodes.push_back(std::move(n));
  if (hashable)
    strash_.emplace(std::move(key), id);
  return id;
}

NodeId ModuleBuilder::constant(const BitVec &value) {
  if (value.width() == 0)
    invalid("zero-width constant");
  Node n;
  n.op = Op::Const;
  n.width = value.width();
  n.value = value;
  return push(std::move(n));
}

NodeId ModuleBuilder::input(const std::string &portName, unsigned w) {
  if (m_.findPort(portName))
    invalid("duplicate port " + portName);
  Node n;
  n.op = Op::Input;
  n.width = w;
  n.aux = static_cast<unsigned>(m_.ports.size());
  NodeId id = push(std::move(n));
  m_.ports.push_back({portName, w, PortDir::In, id});
  return id;
}

NodeId ModuleBuilder::reg(const std::string &regName, unsigned w, const BitVec &init) {
  Node n;
  n.op = Op::Reg;
  n.width = w;
  n.aux = static_cast<unsigned>(m_.registers.size());
  NodeId id = push(std::move(n));
  m_.registers.push_back({regName, w, init.resize(w, false), id, id});
  return id;
}

void ModuleBuilder::setNext(NodeId regNode, NodeId next) {
  const Node &n = m_.nodes.at(regNode);
  if (n.op != Op::Reg)
    invalid("setNext on a non-register node");
  m_.registers[n.aux].next = next;
}

void ModuleBuilder::output(const std::string &portName, NodeId driver) {
  if (m_.findPort(portName))
    invalid("duplicate port " + portName);
  m_.ports.push_back({portName, width(driver), PortDir::Out, driver});
}

std::optional<BitVec> ModuleBuilder::constValue(NodeId n) const {
  if (m_.nodes[n].op == Op::Const)
    return m_.nodes[n].value;
  return std::nullopt;
}

std::optional<NodeId> ModuleBuilder::simplify(Op kind, const Args &a, unsigned aux, unsigned w) {
  auto cv = [&](std::size_t i) { return constValue(a[i]); };
  auto isZero = [&](std::size_t i) { auto c = cv(i); return c && c->isZero(); };
  auto isOnes = [&](std::size_t i) { auto c = cv(i); return c && c->isAllOnes(); };
  auto isOne = [&](std::size_t i) { auto c = cv(i); return c && c->isOne(); };
  const Node *n0 = a.empty() ? nullptr : &m_.nodes[a[0]];
  switch (kind) {
  case Op::Mux:
    if (auto s = cv(0))
      return s->isZero() ? a[2] : a[1];
    if (a[1] == a[2])
      return a[1];
    if (width(a[1]) == 1 && isOne(1) && isZero(2))
      return a[0];
    break;
  case Op::And:
    if (isZero(0) || isOnes(1) || a[0] == a[1])
      return a[0];
    if (isZero(1) || isOnes(0))
      return a[1];
    break;
  case Op::Or:
    if (isZero(1) || isOnes(0) || a[0] == a[1])
      return a[0];
    if (isZero(0) || isOnes(1))
      return a[1];
    break;
  case Op::Xor:
    if (isZero(1))
      return a[0];
    if (isZero(0))
      return a[1];
    if (a[0] == a[1])
      return constant(BitVec(width(a[0])));
    break;
  case Op::Add:
    if (isZero(1))
      return a[0];
    if (isZero(0))
      return a[1];
    break;
  case Op::Sub:
    if (isZero(1))
      return a[0];
    if (a[0] == a[1])
      return constant(BitVec(width(a[0])));
    break;
  case Op::Mul:
    if (isZero(0) || isOne(1))
      return a[0];
    if (isZero(1) || isOne(0))
      return a[1];
    break;
  case Op::Shl:
  case Op::Lshr:
  case Op::Ashr:
    if (isZero(1) || isZero(0))
      return a[0];
    break;
  case Op::Not:
    if (n0->op == Op::Not)
      return n0->args[0];
    break;
  case Op::Eq:
  case Op::Ule:
  case Op::Sle:
    if (a[0] == a[1])
      return constant(BitVec(1, 1));
    break;
  case Op::Ult:
  case Op::Slt:
    if (a[0] == a[1])
      return constant(BitVec(1, 0));
    break;
  case Op::Extract: {
    if (aux == 0 && w == n0->width)
      return a[0];
    if (n0->op == Op::Extract)
      return op(Op::Extract, {n0->args[0]}, aux + n0->aux, w);
    if (n0->op == Op::Concat) {
      unsigned loW = width(n0->args[1]);
      if (aux + w <= loW)
        return op(Op::Extract, {n0->args[1]}, aux, w);
      if (aux >= loW)
        return op(Op::Extract, {n0->args[0]}, aux - loW, w);
    }
    if (n0->op == Op::Zext || n0->op == Op::Sext) {
      unsigned srcW = width(n0->args[0]);
      if (aux + w <= srcW)
        return op(Op::Extract, {n0->args[0]}, aux, w);
      if (n0->op == Op::Zext && aux >= srcW)
        return constant(BitVec(w));
    }
    break;
  }
  case Op::Zext:
  case Op::Sext:
    if (w == n0->width)
      return a[0];
    if (n0->op == kind)
      return op(kind, {n0->args[0]}, 0, w);
    if (kind == Op::Sext && n0->op == Op::Zext && n0->width > width(n0->args[0]))
      return op(Op::Zext, {n0->args[0]}, 0, w);
    break;
  default:
    break;
  }
  return std::nullopt;
}

NodeId ModuleBuilder::op(Op kind, const Args &argsIn, unsigned aux, unsigned w) {
  std::vector<unsigned> widths;
  for (NodeId a : argsIn) {
    if (a >= m_.nodes.size())
      invalid(std::string(opName(kind)) + " operand %" + std::to_string(a) + " does not exist");
    widths.push_back(m_.nodes[a].width);
  }
  Node n;
  n.op = kind;
  n.width = resultWidth(kind, widths, aux, w);
  n.aux = kind == Op::Extract ? aux : 0;
  n.args = argsIn;
  if (simplify_) {
    if (isCommutative(kind))
      std::sort(n.args.begin(), n.args.end());
    bool allConst = !n.args.empty();
    for (NodeId a : n.args)
      allConst = allConst && m_.nodes[a].op == Op::Const;
    if (allConst) {
      std::vector<BitVec> values;
      for (NodeId a : n.args)
        values.push_back(m_.nodes[a].value);
      return constant(evalNode(n, values.data()));
    }
    if (auto s = simplify(kind, n.args, n.aux, n.width))
      return *s;
  }
  return push(std::move(n));
}

NodeId ModuleBuilder::concatLsbFirst(const std::vector<NodeId> &parts) {
  if (parts.empty())
    invalid("empty concatenation");
  NodeId acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i)
    acc = concat(parts[i], acc);
  return acc;
}

NodeId ModuleBuilder::resize(NodeId a, unsigned w, bool isSigned) {
  unsigned from = width(a);
  if (w == from)
    return a;
  if (w < from)
    return extract(a, w - 1, 0);
  return isSigned ? sext(a, w) : zext(a, w);
}

NodeId ModuleBuilder::reduceOr(NodeId a) {
  if (width(a) == 1)
    return a;
  return ne(a, constant(BitVec(width(a))));
}

NodeId ModuleBuilder::modConst(NodeId a, uint64_t m) {
  const unsigned w = width(a);
  if (m == 0)
    invalid("modulo by zero");
  if ((m & (m - 1)) == 0) {
    unsigned k = log2Exact(m);
    if (k >= w)
      return a;
    if (k == 0)
      return constant(BitVec(w));
    return zext(extract(a, k - 1, 0), w);
  }
  // Restoring remainder, one dividend bit per step, MSB first.
  const unsigned rw = log2Exact(m) + 1;
  if (w < rw - 1)
    return a;
  NodeId mc = constant(BitVec(rw, m));
  NodeId r = constant(BitVec(rw));
  for (unsigned i = w; i-- > 0;) {
    r = concat(extract(r, rw - 2, 0), extract(a, i, i));
    r = mux(ule(mc, r), sub(r, mc), r);
  }
  return resize(r, w, false);
}

CoreModule ModuleBuilder::finish() {
  m_.validate();
  strash_.clear();
  return std::move(m_);
}

} // namespace equivfuse::core
