#include "equivfuse/graph/graph.h"

#include "equivfuse/support/error.h"

#include "json.hpp"

#include <map>
#include <set>

namespace equivfuse::graph {

using hir::BinOp;
using hir::Expr;
using hir::HirType;
using hir::Signedness;
using hir::Stmt;
using nlohmann::json;

unsigned TensorDecl::elements() const {
  unsigned n = 1;
  for (unsigned d : shape)
    n *= d;
  return n;
}

HirType TensorDecl::hirType() const {
  return shape.empty() ? HirType::scalar(sign, width) : HirType::array(sign, width, elements());
}

std::string_view graphOpName(GraphOp op) {
  switch (op) {
  case GraphOp::Dot: return "dot";
  case GraphOp::Matmul: return "matmul";
  case GraphOp::EwAdd: return "ewadd";
  case GraphOp::EwMul: return "ewmul";
  case GraphOp::ReduceSum: return "reduce_sum";
  }
  return "?";
}

const TensorDecl &GraphSpec::tensor(const std::string &n) const {
  for (const auto &t : tensors)
    if (t.name == n)
      return t;
  fail(ErrorKind::SchemaError, "undeclared tensor '" + n + "'");
}

namespace {

std::string shapeText(const std::vector<unsigned> &s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

class SchemaReader {
 public:
  explicit SchemaReader(std::string_view file) : file_(file) {}

  [[noreturn]] void error(const std::string &msg) {
    fail(ErrorKind::SchemaError, (file_.empty() ? std::string() : file_ + ": ") + msg);
  }

  const json &field(const json &obj, const char *key, const std::string &where) {
    if (!obj.is_object())
      error(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end())
      error(where + " lacks \"" + key + "\"");
    return *it;
  }

  std::string str(const json &v, const std::string &where) {
    if (!v.is_string())
      error(where + " must be a string");
    return v.get<std::string>();
  }

  std::vector<std::string> names(const json &v, const std::string &where) {
    if (!v.is_array())
      error(where + " must be an array of names");
    std::vector<std::string> out;
    for (const auto &x : v)
      out.push_back(str(x, where));
    return out;
  }

  void dtype(const std::string &text, TensorDecl &t) {
    if (text.size() < 2 || (text[0] != 's' && text[0] != 'u') ||
        text.find_first_not_of("0123456789", 1) != std::string::npos || text.size() > 3)
      error("tensor " + t.name + ": bad dtype '" + text + "'");
    unsigned w = static_cast<unsigned>(std::stoul(text.substr(1)));
    if (w < 1 || w > 64)
      error("tensor " + t.name + ": dtype width must be 1..64");
    t.sign = text[0] == 's' ? Signedness::Signed : Signedness::Unsigned;
    t.width = w;
  }

 private:
  std::string file_;
};

} // namespace

GraphSpec parseGraph(std::string_view text, std::string_view fileName) {
  SchemaReader r(fileName);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    r.error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    r.error("top level must be an object");
  static const std::set<std::string> kKeys = {"name", "tensors", "nodes", "inputs", "outputs"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kKeys.count(it.key()))
      r.error("unknown key \"" + it.key() + "\"");

  GraphSpec g;
  if (doc.contains("name"))
    g.name = r.str(doc["name"], "name");
  const json &tensors = r.field(doc, "tensors", "document");
  if (!tensors.is_array())
    r.error("tensors must be an array");
  std::set<std::string> declared;
  for (const auto &t : tensors) {
    TensorDecl d;
    d.name = r.str(r.field(t, "name", "tensor"), "tensor name");
    const json &shape = r.field(t, "shape", "tensor " + d.name);
    if (!shape.is_array())
      r.error("tensor " + d.name + ": shape must be an array");
    for (const auto &dim : shape) {
      if (!dim.is_number_integer() || dim.get<int64_t>() < 1 || dim.get<int64_t>() > (1 << 20))
        r.error("tensor " + d.name + ": dimensions must be positive integers");
      d.shape.push_back(dim.get<unsigned>());
    }
    r.dtype(r.str(r.field(t, "dtype", "tensor " + d.name), "dtype"), d);
    if (!declared.insert(d.name).second)
      r.error("tensor " + d.name + " declared twice");
    g.tensors.push_back(std::move(d));
  }
  g.inputs = r.names(r.field(doc, "inputs", "document"), "inputs");
  g.outputs = r.names(r.field(doc, "outputs", "document"), "outputs");

  std::set<std::string> available;
  for (const auto &in : g.inputs) {
    g.tensor(in);
    if (!available.insert(in).second)
      r.error("input " + in + " listed twice");
  }

  static const std::map<std::string, GraphOp> kOps = {{"dot", GraphOp::Dot},
                                                      {"matmul", GraphOp::Matmul},
                                                      {"ewadd", GraphOp::EwAdd},
                                                      {"ewmul", GraphOp::EwMul},
                                                      {"reduce_sum", GraphOp::ReduceSum}};
  const json &nodes = r.field(doc, "nodes", "document");
  if (!nodes.is_array())
    r.error("nodes must be an array");
  for (const auto &n : nodes) {
    GraphNode node;
    std::string op = r.str(r.field(n, "op", "node"), "op");
    auto it = kOps.find(op);
    if (it == kOps.end())
      fail(ErrorKind::UnknownOp, op);
    node.op = it->second;
    node.args = r.names(r.field(n, "args", "node " + op), "args");
    node.result = r.str(r.field(n, "result", "node " + op), "result");
    std::string where = std::string(graphOpName(node.op)) + " -> " + node.result;
    for (const auto &a : node.args)
      if (!available.count(a)) {
        g.tensor(a);
        r.error(where + ": operand " + a + " is not yet defined (nodes must be topologically ordered)");
      }
    const TensorDecl &res = g.tensor(node.result);
    if (available.count(node.result))
      r.error(where + ": tensor " + node.result + " assigned twice");

    std::size_t arity = node.op == GraphOp::ReduceSum ? 1 : 2;
    if (node.args.size() != arity)
      fail(ErrorKind::ShapeMismatch, where + ": expects " + std::to_string(arity) + " operands");
    auto shapeError = [&](const std::string &why) { fail(ErrorKind::ShapeMismatch, where + ": " + why); };
    const TensorDecl &a = g.tensor(node.args[0]);
    const TensorDecl *b = arity == 2 ? &g.tensor(node.args[1]) : nullptr;
    auto scalarResult = [&] {
      if (!(res.shape.empty() || (res.shape.size() == 1 && res.shape[0] == 1)))
        shapeError("result must be a scalar, got " + shapeText(res.shape));
    };
    switch (node.op) {
    case GraphOp::Dot:
      if (a.shape.size() != 1 || b->shape.size() != 1 || a.shape != b->shape)
        shapeError("operands " + shapeText(a.shape) + " and " + shapeText(b->shape) +
                   " must be equal-length vectors");
      scalarResult();
      break;
    case GraphOp::Matmul:
      if (a.shape.size() != 2 || b->shape.size() != 2 || a.shape[1] != b->shape[0])
        shapeError("cannot multiply " + shapeText(a.shape) + " by " + shapeText(b->shape));
      if (res.shape != std::vector<unsigned>{a.shape[0], b->shape[1]})
        shapeError("result must be " + shapeText({a.shape[0], b->shape[1]}));
      break;
    case GraphOp::EwAdd:
    case GraphOp::EwMul:
      if (a.shape != b->shape || res.shape != a.shape)
        shapeError("element-wise shapes " + shapeText(a.shape) + ", " + shapeText(b->shape) + " -> " +
                   shapeText(res.shape) + " must agree");
      break;
    case GraphOp::ReduceSum:
      scalarResult();
      break;
    }
    available.insert(node.result);
    g.nodes.push_back(std::move(node));
  }
  std::set<std::string> outs;
  for (const auto &o : g.outputs) {
    if (!available.count(o)) {
      g.tensor(o);
      r.error("output " + o + " is never produced");
    }
    if (!outs.insert(o).second)
      r.error("output " + o + " listed twice");
  }
  if (g.outputs.empty())
    r.error("graph has no outputs");
  return g;
}

namespace {

class Lowering {
 public:
  Lowering(const GraphSpec &g, hir::HirFunction &f) : g_(g), f_(f) {}

  void run() {
    std::set<std::string> inputs(g_.inputs.begin(), g_.inputs.end());
    std::set<std::string> outputs(g_.outputs.begin(), g_.outputs.end());
    for (const auto &in : g_.inputs)
      slot_[in] = declare(in, g_.tensor(in).hirType(), true, hir::ParamDir::In);
    for (const auto &out : g_.outputs) {
      if (inputs.count(out)) {
        unsigned s = declare(out + "_out", g_.tensor(out).hirType(), true, hir::ParamDir::Out);
        passthrough_.push_back({slot_[out], s});
      } else {
        slot_[out] = declare(out, g_.tensor(out).hirType(), true, hir::ParamDir::Out);
      }
    }
    for (const auto &n : g_.nodes)
      if (!slot_.count(n.result))
        slot_[n.result] = declare(n.result, g_.tensor(n.result).hirType(), false, hir::ParamDir::In);
    for (const auto &n : g_.nodes)
      node(n);
    for (auto [from, to] : passthrough_) {
      const HirType &t = f_.vars[from].type;
      if (!t.isArray) {
        f_.body.push_back(Stmt::assign(Expr::varRef(to), Expr::varRef(from)));
        continue;
      }
      unsigned i = loopVar();
      std::vector<Stmt> body;
      body.push_back(Stmt::assign(Expr::index(to, Expr::varRef(i)), Expr::index(from, Expr::varRef(i))));
      f_.body.push_back(Stmt::forLoop(loop(i, t.length), std::move(body)));
    }
  }

 private:
  unsigned declare(const std::string &name, HirType t, bool param, hir::ParamDir dir) {
    if (f_.findVar(name))
      fail(ErrorKind::SchemaError, "name collision on '" + name + "' while lowering");
    hir::Variable v;
    v.name = name;
    v.type = t;
    v.isParam = param;
    v.dir = dir;
    v.dirExplicit = param;
    f_.vars.push_back(std::move(v));
    return static_cast<unsigned>(f_.vars.size() - 1);
  }

  unsigned loopVar() {
    hir::Variable v;
    v.name = "i." + std::to_string(loops_++);
    v.type = HirType::scalar(Signedness::Signed, 32);
    v.loopVar = true;
    f_.vars.push_back(std::move(v));
    return static_cast<unsigned>(f_.vars.size() - 1);
  }

  static hir::ForHeader loop(unsigned var, unsigned n) { return hir::ForHeader{var, 0, BinOp::Lt, n, 1}; }

  /// Truncate or extend (per the source sign) to `to`.
  static Expr resize(Expr e, const HirType &from, const HirType &to) {
    if (from == to)
      return e;
    hir::CastKind k = to.width < from.width ? hir::CastKind::Trunc
                                            : (from.isSigned() ? hir::CastKind::Sext : hir::CastKind::Zext);
    return Expr::castTo(k, to, std::move(e));
  }

  Expr element(const std::string &tensor, Expr index) {
    unsigned s = slot_.at(tensor);
    if (!f_.vars[s].type.isArray)
      return Expr::varRef(s);
    return Expr::index(s, std::move(index));
  }

  Expr target(const std::string &tensor, Expr index) { return element(tensor, std::move(index)); }

  /// a*b formed at the sum of the operand widths, then sized to `res`.
  Expr product(const TensorDecl &a, Expr ea, const TensorDecl &b, Expr eb, const TensorDecl &res) {
    HirType ta = a.hirType().isArray ? a.hirType().element() : a.hirType();
    HirType tb = b.hirType().isArray ? b.hirType().element() : b.hirType();
    unsigned pw = std::min(64u, a.width + b.width);
    Signedness ps = (a.sign == Signedness::Signed || b.sign == Signedness::Signed) ? Signedness::Signed
                                                                                     : Signedness::Unsigned;
    HirType pt = HirType::scalar(ps, pw);
    Expr p = Expr::binary(BinOp::Mul, resize(std::move(ea), ta, HirType::scalar(ta.sign, pw)),
                          resize(std::move(eb), tb, HirType::scalar(tb.sign, pw)));
    // Operands were brought to width pw; unify the sign for the multiply.
    p.args[0] = resize(std::move(p.args[0]), HirType::scalar(ta.sign, pw), pt);
    p.args[1] = resize(std::move(p.args[1]), HirType::scalar(tb.sign, pw), pt);
    return resize(std::move(p), pt, scalarOf(res));
  }

  static HirType scalarOf(const TensorDecl &t) { return HirType::scalar(t.sign, t.width); }

  static Expr lit(int64_t v) { return Expr::literal(v); }

  void node(const GraphNode &n) {
    const TensorDecl &res = g_.tensor(n.result);
    const TensorDecl &a = g_.tensor(n.args[0]);
    HirType rt = scalarOf(res);
    switch (n.op) {
    case GraphOp::Dot:
    case GraphOp::ReduceSum: {
      const bool dot = n.op == GraphOp::Dot;
      f_.body.push_back(Stmt::assign(target(n.result, lit(0)), lit(0)));
      unsigned i = loopVar();
      Expr term = dot ? product(a, element(a.name, Expr::varRef(i)), g_.tensor(n.args[1]),
                                element(n.args[1], Expr::varRef(i)), res)
                      : resize(element(a.name, Expr::varRef(i)), scalarOf(a), rt);
      std::vector<Stmt> body;
      body.push_back(Stmt::assign(target(n.result, lit(0)),
                                  Expr::binary(BinOp::Add, target(n.result, lit(0)), std::move(term))));
      f_.body.push_back(Stmt::forLoop(loop(i, a.elements()), std::move(body)));
      break;
    }
    case GraphOp::Matmul: {
      const TensorDecl &b = g_.tensor(n.args[1]);
      unsigned m = a.shape[0], k = a.shape[1], nn = b.shape[1];
      unsigned vi = loopVar(), vj = loopVar(), vk = loopVar();
      auto flat = [](unsigned row, unsigned cols, unsigned col) {
        return Expr::binary(BinOp::Add, Expr::binary(BinOp::Mul, Expr::varRef(row), lit(cols)), Expr::varRef(col));
      };
      std::vector<Stmt> inner;
      inner.push_back(Stmt::assign(
          target(n.result, flat(vi, nn, vj)),
          Expr::binary(BinOp::Add, target(n.result, flat(vi, nn, vj)),
                       product(a, element(a.name, flat(vi, k, vk)), b, element(b.name, flat(vk, nn, vj)), res))));
      std::vector<Stmt> mid;
      mid.push_back(Stmt::assign(target(n.result, flat(vi, nn, vj)), lit(0)));
      mid.push_back(Stmt::forLoop(loop(vk, k), std::move(inner)));
      std::vector<Stmt> outer;
      outer.push_back(Stmt::forLoop(loop(vj, nn), std::move(mid)));
      f_.body.push_back(Stmt::forLoop(loop(vi, m), std::move(outer)));
      break;
    }
    case GraphOp::EwAdd:
    case GraphOp::EwMul: {
      const TensorDecl &b = g_.tensor(n.args[1]);
      unsigned i = loopVar();
      Expr value = n.op == GraphOp::EwMul
                       ? product(a, element(a.name, Expr::varRef(i)), b, element(b.name, Expr::varRef(i)), res)
                       : Expr::binary(BinOp::Add, resize(element(a.name, Expr::varRef(i)), scalarOf(a), rt),
                                      resize(element(b.name, Expr::varRef(i)), scalarOf(b), rt));
      std::vector<Stmt> body;
      body.push_back(Stmt::assign(target(n.result, Expr::varRef(i)), std::move(value)));
      f_.body.push_back(Stmt::forLoop(loop(i, a.elements()), std::move(body)));
      break;
    }
    }
  }

  const GraphSpec &g_;
  hir::HirFunction &f_;
  std::map<std::string, unsigned> slot_;
  std::vector<std::pair<unsigned, unsigned>> passthrough_;
  unsigned loops_ = 0;
};

} // namespace

hir::HirFunction lowerGraphToHir(const GraphSpec &g, const std::string &functionName) {
  hir::HirFunction f;
  f.name = functionName;
  Lowering(g, f).run();
  return f;
}

} // namespace equivfuse::graph
