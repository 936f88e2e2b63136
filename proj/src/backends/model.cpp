#include "equivfuse/backends/backends.h"

#include "equivfuse/support/error.h"

#include "sexpr.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace equivfuse::backends {

namespace {

std::string excerpt(std::string_view s) {
  std::string out(s.substr(0, 200));
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out + (s.size() > 200 ? "..." : "");
}

std::vector<std::string_view> splitLines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t nl = s.find('\n', pos);
    std::string_view line = s.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos)
      break;
    pos = nl + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; is >> w;)
    out.push_back(w);
  return out;
}

ModelResult unknown(const std::string &why, std::string_view raw) {
  ModelResult r;
  r.reason = why + ": " + excerpt(raw);
  return r;
}

ModelResult sat(Counterexample cex) {
  ModelResult r;
  r.status = ModelStatus::Sat;
  r.cex = std::move(cex);
  return r;
}

ModelResult unsat() {
  ModelResult r;
  r.status = ModelStatus::Unsat;
  return r;
}

/// Assembles a counterexample from per-symbol values; missing symbols are
/// zero and recorded as defaulted.
Counterexample assemble(const SymbolMap &symbols, const std::vector<std::optional<BitVec>> &values,
                        const std::vector<std::string> &partial = {}) {
  Counterexample cex;
  unsigned frames = 1;
  for (const auto &s : symbols.inputs)
    frames = std::max(frames, s.frame + 1);
  cex.frames.resize(frames);
  for (std::size_t i = 0; i < symbols.inputs.size(); ++i) {
    const auto &s = symbols.inputs[i];
    if (values[i]) {
      cex.frames[s.frame][s.port] = *values[i];
    } else {
      cex.frames[s.frame][s.port] = BitVec(s.width);
      cex.defaulted.push_back(s.port + "@" + std::to_string(s.frame));
    }
  }
  for (const auto &p : partial)
    if (std::find(cex.defaulted.begin(), cex.defaulted.end(), p) == cex.defaulted.end())
      cex.defaulted.push_back(p);
  return cex;
}

/// Per-bit model values (-1 unknown) of the symbols laid out on consecutive
/// solver indices starting at each symbol's id with stride `stride`.
Counterexample fromIndexed(const SymbolMap &symbols, const std::map<uint64_t, bool> &model, unsigned stride) {
  std::vector<std::optional<BitVec>> values;
  std::vector<std::string> partial;
  for (const auto &s : symbols.inputs) {
    uint64_t first = std::stoull(s.id);
    BitVec v(s.width);
    bool any = false, missing = false;
    for (unsigned b = 0; b < s.width; ++b) {
      auto it = model.find(first + uint64_t{stride} * b);
      if (it == model.end()) {
        missing = true;
        continue;
      }
      any = true;
      v.setBit(b, it->second);
    }
    if (missing && any)
      partial.push_back(s.port + "@" + std::to_string(s.frame));
    values.push_back(any ? std::optional<BitVec>(v) : std::nullopt);
  }
  return assemble(symbols, values, partial);
}

std::optional<BitVec> smtValue(const SExpr &v, unsigned width) {
  if (!v.isList) {
    if (v.atom.rfind("#b", 0) == 0)
      return BitVec::fromBinary(v.atom.substr(2)).resize(width, false);
    if (v.atom.rfind("#x", 0) == 0)
      return BitVec::fromHex(v.atom.substr(2), width);
    return std::nullopt;
  }
  // (_ bvN W)
  if (v.list.size() == 3 && v.list[0].atom == "_" && v.list[1].atom.rfind("bv", 0) == 0)
    return BitVec::fromDecimal(v.list[1].atom.substr(2), width);
  return std::nullopt;
}

void collectDefines(const SExpr &e, std::map<std::string, const SExpr *> &defs) {
  if (!e.isList)
    return;
  if (e.list.size() == 5 && !e.list[0].isList && e.list[0].atom == "define-fun" && !e.list[1].isList) {
    defs[e.list[1].atom] = &e.list[4];
    return;
  }
  // get-value answer: ((sym value) ...)
  if (e.list.size() == 2 && !e.list[0].isList) {
    defs.emplace(e.list[0].atom, &e.list[1]);
    return;
  }
  for (const auto &c : e.list)
    collectDefines(c, defs);
}

ModelResult parseSmt(std::string_view text, const SymbolMap &symbols) {
  std::vector<SExpr> top = SExprReader(text).all();
  std::size_t i = 0;
  while (i < top.size() && top[i].isList) {
    if (!top[i].list.empty() && top[i].list[0].atom == "error")
      return unknown("solver-error", text);
    ++i;
  }
  if (i == top.size())
    return unknown("parse-failure", text);
  const std::string &verdict = top[i].atom;
  if (verdict == "unsat")
    return unsat();
  if (verdict == "unknown" || verdict == "timeout")
    return unknown("solver-error", text);
  if (verdict != "sat")
    return unknown("parse-failure", text);
  std::map<std::string, const SExpr *> defs;
  for (std::size_t k = i + 1; k < top.size(); ++k) {
    if (top[k].isList && !top[k].list.empty() && top[k].list[0].atom == "error")
      return unknown("solver-error", text);
    collectDefines(top[k], defs);
  }
  std::vector<std::optional<BitVec>> values;
  for (const auto &s : symbols.inputs) {
    auto it = defs.find(s.id);
    if (it == defs.end()) {
      values.push_back(std::nullopt);
      continue;
    }
    auto v = smtValue(*it->second, s.width);
    if (!v)
      return unknown("parse-failure", text);
    values.push_back(v);
  }
  return sat(assemble(symbols, values));
}

ModelResult parseBtor2Witness(std::string_view text, const SymbolMap &symbols) {
  auto lines = splitLines(text);
  std::size_t i = 0;
  auto skipBlank = [&] {
    while (i < lines.size() && (trim(lines[i]).empty() || trim(lines[i])[0] == ';' ||
                                 trim(lines[i]).rfind("[", 0) == 0))
      ++i;
  };
  skipBlank();
  if (i == lines.size())
    return unknown("parse-failure", text);
  std::string_view first = trim(lines[i]);
  if (first == "unsat")
    return unsat();
  if (first == "unknown")
    return unknown("solver-error", text);
  if (first != "sat")
    return unknown("parse-failure", text);
  ++i;
  // Ordinal of each BTOR2 input among the declared inputs.
  std::map<uint64_t, std::size_t> ordinal;
  for (std::size_t k = 0; k < symbols.inputs.size(); ++k)
    ordinal[k] = k;
  std::vector<std::optional<BitVec>> values(symbols.inputs.size());
  bool inFrame0 = false, sawWitness = false;
  for (; i < lines.size(); ++i) {
    std::string_view l = trim(lines[i]);
    if (l.empty() || l[0] == ';')
      continue;
    if (l == ".")
      break;
    if (l[0] == 'b') {
      sawWitness = true;
      continue;
    }
    if (l[0] == '#') {
      inFrame0 = false;
      continue;
    }
    if (l[0] == '@') {
      inFrame0 = l == "@0";
      continue;
    }
    if (!inFrame0)
      continue;
    auto w = words(l);
    if (w.size() < 2 || w[0].find_first_not_of("0123456789") != std::string::npos)
      return unknown("parse-failure", text);
    std::size_t idx = std::stoul(w[0]);
    if (idx >= symbols.inputs.size() || w[1].size() != symbols.inputs[idx].width ||
        w[1].find_first_not_of("01") != std::string::npos)
      return unknown("parse-failure", text);
    values[idx] = BitVec::fromBinary(w[1]);
  }
  if (!sawWitness && !symbols.inputs.empty())
    return unknown("parse-failure: sat without a witness", text);
  return sat(assemble(symbols, values));
}

ModelResult parseDimacsModel(std::string_view text, const SymbolMap &symbols) {
  std::optional<ModelStatus> status;
  std::map<uint64_t, bool> model;
  for (std::string_view raw : splitLines(text)) {
    std::string_view l = trim(raw);
    if (l.empty() || l[0] == 'c')
      continue;
    if (l.rfind("s ", 0) == 0 || l == "SAT" || l == "UNSAT" || l == "SATISFIABLE" || l == "UNSATISFIABLE") {
      std::string_view v = l.rfind("s ", 0) == 0 ? trim(l.substr(2)) : l;
      if (v == "SATISFIABLE" || v == "SAT")
        status = ModelStatus::Sat;
      else if (v == "UNSATISFIABLE" || v == "UNSAT")
        status = ModelStatus::Unsat;
      else
        return unknown("solver-error", text);
      continue;
    }
    if (l[0] == 'v' || std::isdigit(static_cast<unsigned char>(l[0])) || l[0] == '-') {
      for (const auto &w : words(l[0] == 'v' ? l.substr(1) : l)) {
        long long x = 0;
        try {
          x = std::stoll(w);
        } catch (...) {
          return unknown("parse-failure", text);
        }
        if (x != 0)
          model[static_cast<uint64_t>(x < 0 ? -x : x)] = x > 0;
      }
      continue;
    }
  }
  if (!status)
    return unknown("parse-failure", text);
  if (*status == ModelStatus::Unsat)
    return unsat();
  return sat(fromIndexed(symbols, model, 1));
}

ModelResult parseAigerWitness(std::string_view text, const SymbolMap &symbols) {
  auto lines = splitLines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty())
    ++i;
  if (i == lines.size())
    return unknown("parse-failure", text);
  std::string_view first = trim(lines[i]);
  if (first == "0")
    return unsat();
  if (first == "2")
    return unknown("solver-error", text);
  if (first != "1")
    // Some bit-level tools answer in DIMACS style.
    return parseDimacsModel(text, symbols);
  ++i;
  std::size_t numInputs = 0;
  for (const auto &s : symbols.inputs)
    numInputs += s.width;
  std::map<uint64_t, bool> model;
  bool found = false;
  for (; i < lines.size(); ++i) {
    std::string_view l = trim(lines[i]);
    if (l.empty() || l[0] == 'b' || l[0] == 'c')
      continue;
    if (l == ".")
      break;
    if (l.size() != numInputs || l.find_first_not_of("01x") != std::string_view::npos) {
      if (numInputs == 0)
        break;
      // Latch initialization lines have a different length; skip them.
      continue;
    }
    for (std::size_t b = 0; b < l.size(); ++b)
      if (l[b] != 'x')
        model[2 * (b + 1)] = l[b] == '1';
    found = true;
    break;
  }
  if (!found && numInputs > 0)
    return unknown("parse-failure: sat without an input vector", text);
  return sat(fromIndexed(symbols, model, 2));
}

} // namespace

Counterexample counterexampleFromBits(const SymbolMap &symbols, const std::vector<bool> &bits) {
  std::vector<std::optional<BitVec>> values;
  std::size_t pos = 0;
  for (const auto &s : symbols.inputs) {
    BitVec v(s.width);
    for (unsigned b = 0; b < s.width; ++b, ++pos)
      v.setBit(b, pos < bits.size() && bits[pos]);
    values.push_back(v);
  }
  return assemble(symbols, values);
}

ModelResult parseModel(Format f, std::string_view text, const SymbolMap &symbols) {
  try {
    switch (f) {
    case Format::Smtlib: return parseSmt(text, symbols);
    case Format::Btor2: return parseBtor2Witness(text, symbols);
    case Format::Aiger:
    case Format::AigerBinary: return parseAigerWitness(text, symbols);
    case Format::Dimacs: return parseDimacsModel(text, symbols);
    }
  } catch (const std::exception &e) {
    return unknown(std::string("parse-failure: ") + e.what(), text);
  }
  return unknown("parse-failure", text);
}

core::Aig readAiger(std::string_view bytes) {
  std::size_t pos = 0;
  auto bad = [](const std::string &msg) -> void { fail(ErrorKind::ParseFailure, "AIGER: " + msg); };
  auto line = [&]() {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = bytes.size();
    std::string_view l = bytes.substr(pos, nl - pos);
    pos = std::min(nl + 1, bytes.size());
    return std::string(l);
  };
  auto hdr = words(line());
  if (hdr.size() != 6 || (hdr[0] != "aag" && hdr[0] != "aig"))
    bad("bad header");
  bool binary = hdr[0] == "aig";
  uint32_t M, I, L, O, A;
  try {
    M = static_cast<uint32_t>(std::stoul(hdr[1]));
    I = static_cast<uint32_t>(std::stoul(hdr[2]));
    L = static_cast<uint32_t>(std::stoul(hdr[3]));
    O = static_cast<uint32_t>(std::stoul(hdr[4]));
    A = static_cast<uint32_t>(std::stoul(hdr[5]));
  } catch (...) {
    bad("bad header numbers");
  }
  if (L != 0)
    bad("latches are not supported");
  core::Aig a;
  a.numVars = M;
  auto num = [&](const std::string &w) -> uint32_t {
    if (w.empty() || w.find_first_not_of("0123456789") != std::string::npos)
      bad("expected a number, got '" + w + "'");
    return static_cast<uint32_t>(std::stoul(w));
  };
  for (uint32_t i = 0; i < I; ++i)
    a.inputs.push_back(binary ? 2 * (i + 1) : num(std::string(trim(line()))));
  for (uint32_t i = 0; i < O; ++i)
    a.outputs.push_back(num(std::string(trim(line()))));
  for (uint32_t i = 0; i < A; ++i) {
    core::AndGate g;
    if (binary) {
      auto varint = [&]() {
        uint32_t x = 0;
        unsigned shift = 0;
        for (;;) {
          if (pos >= bytes.size())
            bad("truncated AND section");
          auto c = static_cast<unsigned char>(bytes[pos++]);
          x |= static_cast<uint32_t>(c & 0x7f) << shift;
          if (!(c & 0x80))
            return x;
          shift += 7;
        }
      };
      g.lhs = 2 * (I + L + i + 1);
      uint32_t d0 = varint(), d1 = varint();
      g.rhs0 = g.lhs - d0;
      g.rhs1 = g.rhs0 - d1;
      std::swap(g.rhs0, g.rhs1);
    } else {
      auto w = words(line());
      if (w.size() != 3)
        bad("bad AND line");
      g.lhs = num(w[0]);
      g.rhs0 = num(w[1]);
      g.rhs1 = num(w[2]);
    }
    a.ands.push_back(g);
  }
  a.inputNames.assign(I, "");
  a.outputNames.assign(O, "");
  while (pos < bytes.size()) {
    std::string l = line();
    if (l == "c")
      break;
    if (l.empty())
      continue;
    auto sp = l.find(' ');
    if (sp == std::string::npos || (l[0] != 'i' && l[0] != 'o' && l[0] != 'l'))
      bad("bad symbol line '" + l + "'");
    uint32_t idx = num(l.substr(1, sp - 1));
    if (l[0] == 'i' && idx < I)
      a.inputNames[idx] = l.substr(sp + 1);
    else if (l[0] == 'o' && idx < O)
      a.outputNames[idx] = l.substr(sp + 1);
    else
      bad("symbol index out of range");
  }
  try {
    a.validate();
  } catch (const Error &e) {
    bad(e.detail());
  }
  return a;
}

Cnf readDimacs(std::string_view text) {
  Cnf cnf;
  std::optional<std::size_t> declared;
  std::vector<int> clause;
  for (std::string_view raw : splitLines(text)) {
    std::string_view l = trim(raw);
    if (l.empty() || l[0] == 'c' || l[0] == '%')
      continue;
    if (l[0] == 'p') {
      auto w = words(l);
      if (w.size() != 4 || w[1] != "cnf")
        fail(ErrorKind::ParseFailure, "DIMACS: bad problem line");
      cnf.numVars = std::stoi(w[2]);
      declared = std::stoul(w[3]);
      continue;
    }
    if (!declared)
      fail(ErrorKind::ParseFailure, "DIMACS: clause before the problem line");
    for (const auto &w : words(l)) {
      int x = 0;
      try {
        x = std::stoi(w);
      } catch (...) {
        fail(ErrorKind::ParseFailure, "DIMACS: bad literal '" + w + "'");
      }
      if (std::abs(x) > cnf.numVars)
        fail(ErrorKind::ParseFailure, "DIMACS: literal " + w + " exceeds the variable count");
      if (x == 0) {
        cnf.clauses.push_back(clause);
        clause.clear();
      } else {
        clause.push_back(x);
      }
    }
  }
  if (!declared)
    fail(ErrorKind::ParseFailure, "DIMACS: missing problem line");
  if (!clause.empty())
    cnf.clauses.push_back(clause);
  if (cnf.clauses.size() != *declared)
    fail(ErrorKind::ParseFailure, "DIMACS: header declares " + std::to_string(*declared) + " clauses, found " +
                                      std::to_string(cnf.clauses.size()));
  return cnf;
}

} // namespace equivfuse::backends
