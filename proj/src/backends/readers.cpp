#include "equivfuse/backends/backends.h"

#include "equivfuse/support/error.h"

#include "sexpr.h"

#include <map>
#include <sstream>

namespace equivfuse::backends {

using core::CoreModule;
using core::ModuleBuilder;
using core::NodeId;
using core::Op;

namespace {

[[noreturn]] void bad(const char *fmt, const std::string &msg) {
  fail(ErrorKind::ParseFailure, std::string(fmt) + ": " + msg);
}

unsigned number(const char *fmt, const std::string &s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    bad(fmt, "expected a number, got '" + s + "'");
  return static_cast<unsigned>(std::stoul(s));
}

class SmtReader {
 public:
  CoreModule run(std::string_view text) {
    for (const SExpr &cmd : SExprReader(text).all()) {
      if (!cmd.isList || cmd.list.empty() || cmd.list[0].isList)
        bad("SMT-LIB", "expected a command");
      const std::string &head = cmd.list[0].atom;
      if (head == "declare-const" || head == "declare-fun") {
        std::size_t sortIdx = head == "declare-const" ? 2 : 3;
        if (cmd.list.size() != sortIdx + 1 || cmd.list[1].isList)
          bad("SMT-LIB", "bad " + head);
        if (head == "declare-fun" && !(cmd.list[2].isList && cmd.list[2].list.empty()))
          bad("SMT-LIB", "only nullary functions are supported");
        unsigned w = sortWidth(cmd.list[sortIdx]);
        define(cmd.list[1].atom, b_.input(cmd.list[1].atom, w));
      } else if (head == "define-fun") {
        if (cmd.list.size() != 5 || cmd.list[1].isList || !cmd.list[2].isList || !cmd.list[2].list.empty())
          bad("SMT-LIB", "only nullary define-fun is supported");
        unsigned w = sortWidth(cmd.list[3]);
        NodeId n = expr(cmd.list[4]);
        if (b_.width(n) != w)
          bad("SMT-LIB", "define-fun " + cmd.list[1].atom + " has the wrong width");
        define(cmd.list[1].atom, n);
      } else if (head == "assert") {
        if (cmd.list.size() != 2)
          bad("SMT-LIB", "bad assert");
        NodeId n = expr(cmd.list[1]);
        if (b_.width(n) != 1)
          bad("SMT-LIB", "assertion is not Boolean");
        conj_ = conj_ ? b_.bitAnd(*conj_, n) : n;
      } else if (head == "set-logic" || head == "set-info" || head == "set-option" || head == "check-sat" ||
                 head == "get-model" || head == "exit" || head == "get-value") {
        continue;
      } else {
        bad("SMT-LIB", "unsupported command " + head);
      }
    }
    b_.output("neq", conj_ ? *conj_ : b_.constant(1, 1));
    return b_.finish();
  }

 private:
  void define(const std::string &name, NodeId n) {
    if (!env_.emplace(name, n).second)
      bad("SMT-LIB", "symbol " + name + " defined twice");
  }

  unsigned sortWidth(const SExpr &s) {
    if (!s.isList && s.atom == "Bool")
      return 1;
    if (!s.isList || s.list.size() != 3 || s.list[0].atom != "_" || s.list[1].atom != "BitVec")
      bad("SMT-LIB", "unsupported sort");
    return number("SMT-LIB", s.list[2].atom);
  }

  NodeId expr(const SExpr &e) {
    if (!e.isList) {
      const std::string &a = e.atom;
      if (a == "true" || a == "false")
        return b_.constant(1, a == "true");
      if (a.rfind("#b", 0) == 0)
        return b_.constant(BitVec::fromBinary(a.substr(2)));
      if (a.rfind("#x", 0) == 0)
        return b_.constant(BitVec::fromHex(a.substr(2), static_cast<unsigned>(4 * (a.size() - 2))));
      auto it = env_.find(a);
      if (it == env_.end())
        bad("SMT-LIB", "unknown symbol " + a);
      return it->second;
    }
    if (e.list.empty())
      bad("SMT-LIB", "empty expression");
    const SExpr &head = e.list[0];
    if (head.isList) {
      // ((_ extract hi lo) x) and friends.
      const auto &h = head.list;
      if (h.size() < 2 || h[0].atom != "_" || e.list.size() != 2)
        bad("SMT-LIB", "unsupported indexed operator");
      NodeId x = expr(e.list[1]);
      if (h[1].atom == "extract" && h.size() == 4) {
        unsigned hi = number("SMT-LIB", h[2].atom), lo = number("SMT-LIB", h[3].atom);
        if (hi < lo || hi >= b_.width(x))
          bad("SMT-LIB", "extract out of range");
        return b_.extract(x, hi, lo);
      }
      if ((h[1].atom == "zero_extend" || h[1].atom == "sign_extend") && h.size() == 3) {
        unsigned k = number("SMT-LIB", h[2].atom);
        if (k == 0)
          return x;
        unsigned w = b_.width(x) + k;
        return h[1].atom == "zero_extend" ? b_.zext(x, w) : b_.sext(x, w);
      }
      bad("SMT-LIB", "unsupported indexed operator " + h[1].atom);
    }
    const std::string &op = head.atom;
    if (op == "_" && e.list.size() == 3 && e.list[1].atom.rfind("bv", 0) == 0)
      return b_.constant(BitVec::fromDecimal(e.list[1].atom.substr(2), number("SMT-LIB", e.list[2].atom)));
    std::vector<NodeId> args;
    for (std::size_t i = 1; i < e.list.size(); ++i)
      args.push_back(expr(e.list[i]));
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        bad("SMT-LIB", op + " expects " + std::to_string(n) + " arguments");
      for (std::size_t i = 1; i < n && op != "ite" && op != "concat"; ++i)
        if (b_.width(args[i]) != b_.width(args[0]))
          bad("SMT-LIB", op + " has operands of different widths");
    };
    static const std::map<std::string, Op> kBinary = {
        {"bvadd", Op::Add}, {"bvsub", Op::Sub}, {"bvmul", Op::Mul}, {"bvand", Op::And}, {"bvor", Op::Or},
        {"bvxor", Op::Xor}, {"bvshl", Op::Shl}, {"bvlshr", Op::Lshr}, {"bvashr", Op::Ashr}, {"bvult", Op::Ult},
        {"bvslt", Op::Slt}, {"bvule", Op::Ule}, {"bvsle", Op::Sle}, {"concat", Op::Concat}};
    if (auto it = kBinary.find(op); it != kBinary.end()) {
      need(2);
      return b_.op(it->second, {args[0], args[1]});
    }
    if (op == "bvugt" || op == "bvsgt" || op == "bvuge" || op == "bvsge") {
      need(2);
      Op o = op == "bvugt" ? Op::Ult : op == "bvsgt" ? Op::Slt : op == "bvuge" ? Op::Ule : Op::Sle;
      return b_.op(o, {args[1], args[0]});
    }
    if (op == "=") {
      need(2);
      return b_.eq(args[0], args[1]);
    }
    if (op == "distinct") {
      need(2);
      return b_.ne(args[0], args[1]);
    }
    if (op == "bvnot" || op == "not") {
      need(1);
      return b_.bitNot(args[0]);
    }
    if (op == "bvneg") {
      need(1);
      return b_.sub(b_.constant(BitVec(b_.width(args[0]), 0)), args[0]);
    }
    if (op == "and" || op == "or" || op == "xor") {
      if (args.empty())
        bad("SMT-LIB", op + " needs arguments");
      NodeId acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = op == "and" ? b_.bitAnd(acc, args[i]) : op == "or" ? b_.bitOr(acc, args[i]) : b_.bitXor(acc, args[i]);
      return acc;
    }
    if (op == "=>") {
      need(2);
      return b_.bitOr(b_.bitNot(args[0]), args[1]);
    }
    if (op == "ite") {
      need(3);
      if (b_.width(args[0]) != 1 || b_.width(args[1]) != b_.width(args[2]))
        bad("SMT-LIB", "ite operands do not match");
      return b_.mux(args[0], args[1], args[2]);
    }
    bad("SMT-LIB", "unsupported operator " + op);
  }

  ModuleBuilder b_{"smtlib"};
  std::map<std::string, NodeId> env_;
  std::optional<NodeId> conj_;
};

} // namespace

CoreModule readSmtlibProblem(std::string_view text) {
  try {
    return SmtReader().run(text);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::ParseFailure)
      throw;
    bad("SMT-LIB", e.detail());
  }
}

CoreModule readBtor2Problem(std::string_view text) {
  ModuleBuilder b("btor2");
  std::map<unsigned, unsigned> sorts;
  std::map<unsigned, NodeId> nodes;
  std::optional<NodeId> anyBad;
  std::istringstream in{std::string(text)};
  unsigned lineNo = 0, inputs = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineNo;
    auto semi = line.find(';');
    if (semi != std::string::npos)
      line.resize(semi);
    std::istringstream ls(line);
    std::vector<std::string> w;
    for (std::string t; ls >> t;)
      w.push_back(t);
    if (w.empty())
      continue;
    auto where = "line " + std::to_string(lineNo);
    try {
      unsigned id = number("BTOR2", w.at(0));
      const std::string &op = w.at(1);
      auto sortOf = [&](std::size_t i) {
        auto it = sorts.find(number("BTOR2", w.at(i)));
        if (it == sorts.end())
          bad("BTOR2", where + ": unknown sort " + w.at(i));
        return it->second;
      };
      auto arg = [&](std::size_t i) {
        const std::string &t = w.at(i);
        bool neg = !t.empty() && t[0] == '-';
        auto it = nodes.find(number("BTOR2", neg ? t.substr(1) : t));
        if (it == nodes.end())
          bad("BTOR2", where + ": unknown node " + t);
        return neg ? b.bitNot(it->second) : it->second;
      };
      auto put = [&](NodeId n, unsigned width) {
        if (b.width(n) != width)
          bad("BTOR2", where + ": result width differs from the declared sort");
        nodes[id] = n;
      };
      if (op == "sort") {
        if (w.at(2) != "bitvec")
          bad("BTOR2", where + ": only bitvec sorts are supported");
        sorts[id] = number("BTOR2", w.at(3));
        continue;
      }
      if (op == "input") {
        unsigned width = sortOf(2);
        std::string name = w.size() > 3 ? w[3] : "input" + std::to_string(inputs);
        ++inputs;
        put(b.input(name, width), width);
        continue;
      }
      if (op == "bad") {
        NodeId n = arg(2);
        anyBad = anyBad ? b.bitOr(*anyBad, n) : n;
        continue;
      }
      if (op == "output" || op == "constraint" || op == "justice" || op == "fair")
        bad("BTOR2", where + ": " + op + " is not supported");
      unsigned s = sortOf(2);
      if (op == "zero" || op == "one" || op == "ones") {
        put(b.constant(op == "zero" ? BitVec(s, 0) : op == "one" ? BitVec(s, 1) : BitVec::ones(s)), s);
      } else if (op == "const") {
        put(b.constant(BitVec::fromBinary(w.at(3))), s);
      } else if (op == "constd") {
        const std::string &d = w.at(3);
        BitVec v = d[0] == '-' ? BitVec(s, 0) - BitVec::fromDecimal(d.substr(1), s) : BitVec::fromDecimal(d, s);
        put(b.constant(v), s);
      } else if (op == "consth") {
        put(b.constant(BitVec::fromHex(w.at(3), s)), s);
      } else if (op == "not") {
        put(b.bitNot(arg(3)), s);
      } else if (op == "neg") {
        NodeId a = arg(3);
        put(b.sub(b.constant(BitVec(s, 0)), a), s);
      } else if (op == "slice") {
        put(b.extract(arg(3), number("BTOR2", w.at(4)), number("BTOR2", w.at(5))), s);
      } else if (op == "uext" || op == "sext") {
        NodeId a = arg(3);
        put(number("BTOR2", w.at(4)) == 0 ? a : op == "uext" ? b.zext(a, s) : b.sext(a, s), s);
      } else if (op == "ite") {
        put(b.mux(arg(3), arg(4), arg(5)), s);
      } else {
        static const std::map<std::string, Op> kBinary = {
            {"add", Op::Add}, {"sub", Op::Sub}, {"mul", Op::Mul}, {"and", Op::And}, {"or", Op::Or},
            {"xor", Op::Xor}, {"sll", Op::Shl}, {"srl", Op::Lshr}, {"sra", Op::Ashr}, {"eq", Op::Eq},
            {"ult", Op::Ult}, {"slt", Op::Slt}, {"ulte", Op::Ule}, {"slte", Op::Sle}, {"concat", Op::Concat}};
        NodeId x = arg(3), y = arg(4);
        if (auto it = kBinary.find(op); it != kBinary.end())
          put(b.op(it->second, {x, y}), s);
        else if (op == "neq")
          put(b.ne(x, y), s);
        else if (op == "ugt" || op == "sgt" || op == "ugte" || op == "sgte")
          put(b.op(op == "ugt" ? Op::Ult : op == "sgt" ? Op::Slt : op == "ugte" ? Op::Ule : Op::Sle, {y, x}), s);
        else
          bad("BTOR2", where + ": unsupported operator " + op);
      }
    } catch (const std::out_of_range &) {
      bad("BTOR2", where + ": missing operand");
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::ParseFailure)
        throw;
      bad("BTOR2", where + ": " + e.detail());
    }
  }
  if (!anyBad)
    bad("BTOR2", "no bad property");
  b.output("neq", *anyBad);
  return b.finish();
}

SymbolMap rawSymbols(Format f, const CoreModule &problem) {
  SymbolMap s;
  s.format = f;
  unsigned k = 0;
  for (unsigned p : problem.inputPorts()) {
    const auto &port = problem.ports[p];
    s.inputs.push_back({f == Format::Btor2 ? std::to_string(k) : port.name, port.name, port.name, 0, port.width});
    ++k;
  }
  return s;
}

SymbolMap rawSymbols(const core::Aig &a, bool binary) {
  SymbolMap s;
  s.format = binary ? Format::AigerBinary : Format::Aiger;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    std::string name = i < a.inputNames.size() && !a.inputNames[i].empty() ? a.inputNames[i] : "i" + std::to_string(i);
    s.inputs.push_back({std::to_string(a.inputs[i]), name, name, 0, 1});
  }
  return s;
}

SymbolMap rawSymbols(const Cnf &cnf, std::string_view text) {
  SymbolMap s;
  s.format = Format::Dimacs;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    // c input NAME vars A..B lsb-first
    std::istringstream ls(line);
    std::string c, kw, name, vars, range;
    if (!(ls >> c >> kw >> name >> vars >> range) || c != "c" || kw != "input" || vars != "vars")
      continue;
    auto dots = range.find("..");
    if (dots == std::string::npos)
      continue;
    unsigned a = static_cast<unsigned>(std::stoul(range.substr(0, dots)));
    unsigned b = static_cast<unsigned>(std::stoul(range.substr(dots + 2)));
    s.inputs.push_back({std::to_string(a), name, name, 0, b - a + 1});
  }
  if (s.inputs.empty())
    for (int v = 1; v <= cnf.numVars; ++v)
      s.inputs.push_back({std::to_string(v), "v" + std::to_string(v), "v" + std::to_string(v), 0, 1});
  return s;
}

} // namespace equivfuse::backends
