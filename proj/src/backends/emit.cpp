#include "equivfuse/backends/backends.h"

#include "equivfuse/support/error.h"

#include <map>
#include <set>
#include <sstream>

namespace equivfuse::backends {

using core::CoreModule;
using core::Node;
using core::NodeId;
using core::Op;

std::string_view formatName(Format f) {
  switch (f) {
  case Format::Smtlib: return "smtlib";
  case Format::Btor2: return "btor2";
  case Format::Aiger: return "aiger";
  case Format::AigerBinary: return "aig";
  case Format::Dimacs: return "dimacs";
  }
  return "?";
}

std::string_view formatExtension(Format f) {
  switch (f) {
  case Format::Smtlib: return "smt2";
  case Format::Btor2: return "btor2";
  case Format::Aiger: return "aag";
  case Format::AigerBinary: return "aig";
  case Format::Dimacs: return "cnf";
  }
  return "";
}

std::optional<Format> parseFormat(std::string_view t) {
  if (t == "smtlib" || t == "smt2" || t == "smt")
    return Format::Smtlib;
  if (t == "btor2" || t == "btor")
    return Format::Btor2;
  if (t == "aiger" || t == "aag")
    return Format::Aiger;
  if (t == "aig")
    return Format::AigerBinary;
  if (t == "dimacs" || t == "cnf")
    return Format::Dimacs;
  return std::nullopt;
}

std::optional<Format> formatFromPath(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos)
    return std::nullopt;
  std::string_view ext = path.substr(dot + 1);
  // `miter.aiger` is how the original workflow names ASCII AIGER files.
  if (ext == "aiger")
    return Format::Aiger;
  return parseFormat(ext);
}

std::string smtSymbol(std::string_view name) {
  static const std::string_view kExtra = "~!$%^&*_-+=<>.?/";
  std::string out;
  for (char c : name) {
    if (c == '@')
      out += "_f";
    else if (std::isalnum(static_cast<unsigned char>(c)) || kExtra.find(c) != std::string_view::npos)
      out += c;
    else
      out += '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
    out = "_" + out;
  return out;
}

namespace {

std::string header(const miter::MiterModule &m, const char *comment) {
  std::string s = std::string(comment) + " miter spec=" + m.specName + " impl=" + m.implName;
  if (m.sequential)
    s += " frames=" + std::to_string(m.specFrames) + "/" + std::to_string(m.implFrames);
  return s + "\n";
}

NodeId neqNode(const CoreModule &m) {
  auto p = m.findPort("neq");
  if (!p || m.ports[*p].width != 1)
    fail(ErrorKind::InvalidModule, "miter has no 1-bit neq output");
  return m.ports[*p].node;
}

SymbolMap baseSymbols(const miter::MiterModule &m, Format f) {
  SymbolMap s;
  s.format = f;
  s.replay = m;
  s.replay->module = {};
  s.replay->aig.reset();
  for (const auto &in : m.inputs)
    s.inputs.push_back({"", in.name, in.port, in.frame, in.width});
  return s;
}

std::string smtConst(const BitVec &v) { return "#b" + v.toBinary(); }

} // namespace

EmittedProblem emitSmtlib(const miter::MiterModule &mm) {
  const CoreModule &m = mm.module;
  EmittedProblem out;
  out.format = Format::Smtlib;
  out.symbols = baseSymbols(mm, Format::Smtlib);
  std::ostringstream os;
  os << header(mm, ";") << "(set-logic QF_BV)\n";

  std::set<std::string> used = {"neq"};
  std::vector<std::string> names(m.nodes.size());
  auto fresh = [&](std::string base) {
    std::string n = base;
    for (unsigned k = 1; !used.insert(n).second; ++k)
      n = base + "_" + std::to_string(k);
    return n;
  };
  auto sort = [](unsigned w) { return "(_ BitVec " + std::to_string(w) + ")"; };
  for (std::size_t i = 0; i < mm.inputs.size(); ++i) {
    const auto &p = m.ports[m.inputPorts()[i]];
    std::string sym = fresh(smtSymbol(p.name));
    names[p.node] = sym;
    out.symbols.inputs[i].id = sym;
    os << "(declare-const " << sym << " " << sort(p.width) << ")\n";
  }
  NodeId neq = neqNode(m);
  auto bool2bv = [](const std::string &b) { return "(ite " + b + " #b1 #b0)"; };
  for (NodeId i = 0; i < m.nodes.size(); ++i) {
    const Node &n = m.nodes[i];
    if (n.op == Op::Input)
      continue;
    if (n.op == Op::Const) {
      names[i] = smtConst(n.value);
      continue;
    }
    auto a = [&](std::size_t k) { return names[n.args[k]]; };
    std::string e;
    auto bin = [&](const char *f) { return "(" + std::string(f) + " " + a(0) + " " + a(1) + ")"; };
    switch (n.op) {
    case Op::Add: e = bin("bvadd"); break;
    case Op::Sub: e = bin("bvsub"); break;
    case Op::Mul: e = bin("bvmul"); break;
    case Op::And: e = bin("bvand"); break;
    case Op::Or: e = bin("bvor"); break;
    case Op::Xor: e = bin("bvxor"); break;
    case Op::Not: e = "(bvnot " + a(0) + ")"; break;
    case Op::Shl: e = bin("bvshl"); break;
    case Op::Lshr: e = bin("bvlshr"); break;
    case Op::Ashr: e = bin("bvashr"); break;
    case Op::Eq: e = bool2bv(bin("=")); break;
    case Op::Ult: e = bool2bv(bin("bvult")); break;
    case Op::Slt: e = bool2bv(bin("bvslt")); break;
    case Op::Ule: e = bool2bv(bin("bvule")); break;
    case Op::Sle: e = bool2bv(bin("bvsle")); break;
    case Op::Mux: e = "(ite (= " + a(0) + " #b1) " + a(1) + " " + a(2) + ")"; break;
    case Op::Concat: e = bin("concat"); break;
    case Op::Extract:
      e = "((_ extract " + std::to_string(n.aux + n.width - 1) + " " + std::to_string(n.aux) + ") " + a(0) + ")";
      break;
    case Op::Zext:
    case Op::Sext:
      e = "((_ " + std::string(n.op == Op::Zext ? "zero_extend " : "sign_extend ") +
          std::to_string(n.width - m.nodes[n.args[0]].width) + ") " + a(0) + ")";
      break;
    default: fail(ErrorKind::InvalidModule, "unexpected " + std::string(core::opName(n.op)) + " in miter");
    }
    names[i] = i == neq ? "neq" : fresh("t" + std::to_string(i));
    os << "(define-fun " << names[i] << " () " << sort(n.width) << " " << e << ")\n";
  }
  if (names[neq] != "neq")
    os << "(define-fun neq () " << sort(1) << " " << names[neq] << ")\n";
  os << "(assert (= neq #b1))\n(check-sat)\n";
  // get-value keeps the answer small; get-model would print every define-fun.
  if (!out.symbols.inputs.empty()) {
    os << "(get-value (";
    for (std::size_t i = 0; i < out.symbols.inputs.size(); ++i)
      os << (i ? " " : "") << out.symbols.inputs[i].id;
    os << "))\n";
  }
  out.text = os.str();
  return out;
}

EmittedProblem emitBtor2(const miter::MiterModule &mm) {
  const CoreModule &m = mm.module;
  EmittedProblem out;
  out.format = Format::Btor2;
  out.symbols = baseSymbols(mm, Format::Btor2);
  std::ostringstream os;
  os << header(mm, ";");
  unsigned nextId = 1;
  std::map<unsigned, unsigned> sorts;
  auto sort = [&](unsigned w) {
    auto it = sorts.find(w);
    if (it != sorts.end())
      return it->second;
    os << nextId << " sort bitvec " << w << "\n";
    sorts[w] = nextId;
    return nextId++;
  };
  std::vector<unsigned> ids(m.nodes.size());
  auto inPorts = m.inputPorts();
  for (std::size_t i = 0; i < inPorts.size(); ++i) {
    const auto &p = m.ports[inPorts[i]];
    unsigned s = sort(p.width);
    ids[p.node] = nextId;
    out.symbols.inputs[i].id = std::to_string(nextId);
    os << nextId++ << " input " << s << " " << p.name << "\n";
  }
  for (NodeId i = 0; i < m.nodes.size(); ++i) {
    const Node &n = m.nodes[i];
    if (n.op == Op::Input)
      continue;
    unsigned s = sort(n.width);
    auto a = [&](std::size_t k) { return std::to_string(ids[n.args[k]]); };
    std::string line;
    auto bin = [&](const char *f) { return std::string(f) + " " + std::to_string(s) + " " + a(0) + " " + a(1); };
    switch (n.op) {
    case Op::Const: line = "constd " + std::to_string(s) + " " + n.value.toDecimal(); break;
    case Op::Add: line = bin("add"); break;
    case Op::Sub: line = bin("sub"); break;
    case Op::Mul: line = bin("mul"); break;
    case Op::And: line = bin("and"); break;
    case Op::Or: line = bin("or"); break;
    case Op::Xor: line = bin("xor"); break;
    case Op::Not: line = "not " + std::to_string(s) + " " + a(0); break;
    case Op::Shl: line = bin("sll"); break;
    case Op::Lshr: line = bin("srl"); break;
    case Op::Ashr: line = bin("sra"); break;
    case Op::Eq: line = bin("eq"); break;
    case Op::Ult: line = bin("ult"); break;
    case Op::Slt: line = bin("slt"); break;
    case Op::Ule: line = bin("ulte"); break;
    case Op::Sle: line = bin("slte"); break;
    case Op::Mux: line = "ite " + std::to_string(s) + " " + a(0) + " " + a(1) + " " + a(2); break;
    case Op::Concat: line = bin("concat"); break;
    case Op::Extract:
      line = "slice " + std::to_string(s) + " " + a(0) + " " + std::to_string(n.aux + n.width - 1) + " " +
             std::to_string(n.aux);
      break;
    case Op::Zext:
    case Op::Sext:
      line = std::string(n.op == Op::Zext ? "uext " : "sext ") + std::to_string(s) + " " + a(0) + " " +
             std::to_string(n.width - m.nodes[n.args[0]].width);
      break;
    default: fail(ErrorKind::InvalidModule, "unexpected " + std::string(core::opName(n.op)) + " in miter");
    }
    ids[i] = nextId;
    os << nextId++ << " " << line << "\n";
  }
  os << nextId << " bad " << ids[neqNode(m)] << "\n";
  out.text = os.str();
  return out;
}

namespace {

const core::Aig &aigOf(const miter::MiterModule &m, std::optional<core::Aig> &storage) {
  if (m.aig)
    return *m.aig;
  storage = miter::miterAig(m.module);
  return *storage;
}

void aigSymbols(SymbolMap &s, const core::Aig &a, bool cnf) {
  std::size_t bit = 0;
  for (auto &sym : s.inputs) {
    core::Lit first = a.inputs.at(bit);
    sym.id = std::to_string(cnf ? core::litVar(first) : first);
    bit += sym.width;
  }
  if (bit != a.inputs.size())
    fail(ErrorKind::InvalidModule, "miter AIG has " + std::to_string(a.inputs.size()) + " inputs, expected " +
                                       std::to_string(bit));
}

void putVarint(std::string &out, uint32_t x) {
  while (x & ~0x7fu) {
    out += static_cast<char>((x & 0x7f) | 0x80);
    x >>= 7;
  }
  out += static_cast<char>(x);
}

} // namespace

std::string writeAiger(const core::Aig &a, bool binary) {
  if (a.outputs.size() != 1)
    fail(ErrorKind::MultiOutput, "AIGER miter must have one output, has " + std::to_string(a.outputs.size()));
  a.validate();
  std::ostringstream os;
  os << (binary ? "aig " : "aag ") << a.numVars << " " << a.inputs.size() << " " << a.latches.size() << " "
     << a.outputs.size() << " " << a.ands.size() << "\n";
  if (!binary)
    for (core::Lit l : a.inputs)
      os << l << "\n";
  for (const auto &l : a.latches)
    os << (binary ? "" : std::to_string(l.current) + " ") << l.next << (l.init ? " 1" : "") << "\n";
  for (core::Lit l : a.outputs)
    os << l << "\n";
  std::string s = os.str();
  for (const auto &g : a.ands) {
    if (binary) {
      core::Lit r0 = std::max(g.rhs0, g.rhs1), r1 = std::min(g.rhs0, g.rhs1);
      putVarint(s, g.lhs - r0);
      putVarint(s, r0 - r1);
    } else {
      s += std::to_string(g.lhs) + " " + std::to_string(g.rhs0) + " " + std::to_string(g.rhs1) + "\n";
    }
  }
  for (std::size_t i = 0; i < a.inputNames.size(); ++i)
    if (!a.inputNames[i].empty())
      s += "i" + std::to_string(i) + " " + a.inputNames[i] + "\n";
  for (std::size_t i = 0; i < a.outputNames.size(); ++i)
    if (!a.outputNames[i].empty())
      s += "o" + std::to_string(i) + " " + a.outputNames[i] + "\n";
  return s;
}

EmittedProblem emitAiger(const miter::MiterModule &m, bool binary) {
  std::optional<core::Aig> storage;
  const core::Aig &a = aigOf(m, storage);
  EmittedProblem out;
  out.format = binary ? Format::AigerBinary : Format::Aiger;
  out.symbols = baseSymbols(m, out.format);
  aigSymbols(out.symbols, a, false);
  out.text = writeAiger(a, binary);
  out.text += "c\n" + header(m, "equivfuse");
  return out;
}

Cnf tseitin(const core::Aig &a) {
  if (a.outputs.size() != 1)
    fail(ErrorKind::MultiOutput, "CNF miter must have one output, has " + std::to_string(a.outputs.size()));
  Cnf cnf;
  cnf.numVars = static_cast<int>(a.numVars);
  int constVar = 0;
  auto lit = [&](core::Lit l) {
    int v = static_cast<int>(core::litVar(l));
    if (v == 0) {
      // Constant literal: a fresh variable pinned to false.
      if (!constVar) {
        constVar = ++cnf.numVars;
        cnf.clauses.push_back({-constVar});
      }
      v = constVar;
    }
    return core::litNegated(l) ? -v : v;
  };
  for (const auto &g : a.ands) {
    int z = lit(g.lhs), x = lit(g.rhs0), y = lit(g.rhs1);
    cnf.clauses.push_back({-z, x});
    cnf.clauses.push_back({-z, y});
    cnf.clauses.push_back({z, -x, -y});
  }
  cnf.clauses.push_back({lit(a.outputs[0])});
  return cnf;
}

std::string writeDimacs(const core::Aig &a, const std::vector<std::string> &comments) {
  Cnf cnf = tseitin(a);
  std::string s;
  for (const auto &c : comments)
    s += "c " + c + "\n";
  s += "p cnf " + std::to_string(cnf.numVars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto &cl : cnf.clauses) {
    for (int l : cl)
      s += std::to_string(l) + " ";
    s += "0\n";
  }
  return s;
}

EmittedProblem emitDimacs(const miter::MiterModule &m) {
  std::optional<core::Aig> storage;
  const core::Aig &a = aigOf(m, storage);
  EmittedProblem out;
  out.format = Format::Dimacs;
  out.symbols = baseSymbols(m, Format::Dimacs);
  aigSymbols(out.symbols, a, true);
  std::vector<std::string> comments = {header(m, "equivfuse").substr(0, header(m, "equivfuse").size() - 1)};
  for (const auto &sym : out.symbols.inputs) {
    unsigned first = static_cast<unsigned>(std::stoul(sym.id));
    comments.push_back("input " + sym.name + " vars " + std::to_string(first) + ".." +
                       std::to_string(first + sym.width - 1) + " lsb-first");
  }
  out.text = writeDimacs(a, comments);
  return out;
}

EmittedProblem emit(const miter::MiterModule &m, Format f) {
  switch (f) {
  case Format::Smtlib: return emitSmtlib(m);
  case Format::Btor2: return emitBtor2(m);
  case Format::Aiger: return emitAiger(m, false);
  case Format::AigerBinary: return emitAiger(m, true);
  case Format::Dimacs: return emitDimacs(m);
  }
  fail(ErrorKind::Usage, "unknown format");
}

} // namespace equivfuse::backends
