#include "equivfuse/solve/solve.h"

#include "equivfuse/core/passes.h"
#include "equivfuse/core/simulate.h"
#include "equivfuse/support/error.h"

#include <algorithm>

namespace equivfuse::solve {

using backends::Counterexample;
using backends::Format;
using backends::SymbolMap;
using core::CoreModule;

std::string_view reasonName(UnknownReason r) {
  switch (r) {
  case UnknownReason::Timeout: return "timeout";
  case UnknownReason::ParseFailure: return "parse-failure";
  case UnknownReason::SolverError: return "solver-error";
  case UnknownReason::LimitExceeded: return "limit-exceeded";
  }
  return "?";
}

Verdict Verdict::equivalent(std::string engine) {
  Verdict v;
  v.kind = Kind::Equivalent;
  v.engine = std::move(engine);
  return v;
}

Verdict Verdict::unknown(UnknownReason r, std::string detail, std::string engine) {
  Verdict v;
  v.kind = Kind::Unknown;
  v.reason = r;
  v.detail = std::move(detail);
  v.engine = std::move(engine);
  return v;
}

namespace {

Verdict notEquivalent(Counterexample cex, std::string engine) {
  Verdict v;
  v.kind = Verdict::Kind::NotEquivalent;
  v.cex = std::move(cex);
  v.engine = std::move(engine);
  return v;
}

BitVec lookup(const Counterexample &cex, unsigned frame, const std::string &port, unsigned width) {
  if (frame < cex.frames.size()) {
    auto it = cex.frames[frame].find(port);
    if (it != cex.frames[frame].end())
      return it->second.width() == width ? it->second : it->second.resize(width, false);
  }
  return BitVec(width);
}

/// Bits of every symbol, in symbol order and LSB first.
std::vector<bool> cexBits(const SymbolMap &symbols, const Counterexample &cex) {
  std::vector<bool> bits;
  for (const auto &s : symbols.inputs) {
    BitVec v = lookup(cex, s.frame, s.port, s.width);
    for (unsigned b = 0; b < s.width; ++b)
      bits.push_back(v.bit(b));
  }
  return bits;
}

SymbolMap miterSymbols(const miter::MiterModule &m) {
  SymbolMap s;
  for (const auto &in : m.inputs)
    s.inputs.push_back({in.name, in.name, in.port, in.frame, in.width});
  return s;
}

/// Fills the input ports of `m` in order from consecutive bits.
std::vector<BitVec> portValues(const CoreModule &m, const std::vector<bool> &bits) {
  std::vector<BitVec> out;
  std::size_t pos = 0;
  for (unsigned p : m.inputPorts()) {
    BitVec v(m.ports[p].width);
    for (unsigned b = 0; b < v.width(); ++b, ++pos)
      v.setBit(b, pos < bits.size() && bits[pos]);
    out.push_back(v);
  }
  return out;
}

unsigned totalInputBits(const CoreModule &m) {
  unsigned n = 0;
  for (unsigned p : m.inputPorts())
    n += m.ports[p].width;
  return n;
}

/// Enumerates assignments of `m`'s inputs in increasing order; returns the
/// first bit vector with a nonzero output 0.
std::optional<std::vector<bool>> enumerate(const CoreModule &m) {
  unsigned n = totalInputBits(m);
  core::Evaluator ev(m);
  std::vector<unsigned> widths;
  for (unsigned p : m.inputPorts())
    widths.push_back(m.ports[p].width);
  std::vector<BitVec> in;
  for (unsigned w : widths)
    in.push_back(BitVec(w));
  for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
    uint64_t rest = x;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      in[i] = BitVec(widths[i], widths[i] >= 64 ? rest : rest & ((uint64_t{1} << widths[i]) - 1));
      rest = widths[i] >= 64 ? 0 : rest >> widths[i];
    }
    if (!ev.step(in).at(0).isZero()) {
      std::vector<bool> bits(n);
      for (unsigned b = 0; b < n; ++b)
        bits[b] = (x >> b) & 1;
      return bits;
    }
  }
  return std::nullopt;
}

std::string satEngineName(const SatOptions &o) { return o.algorithm == SatAlgorithm::Cdcl ? "internal-sat" : "internal-dpll"; }

} // namespace

std::string verdictLabel(const Verdict &v) {
  switch (v.kind) {
  case Verdict::Kind::Equivalent: return "EQUIVALENT";
  case Verdict::Kind::NotEquivalent: return "NOT EQUIVALENT";
  case Verdict::Kind::Unknown: return "UNKNOWN(" + std::string(reasonName(v.reason)) + ")";
  }
  return "?";
}

int exitCode(const Verdict &v) {
  switch (v.kind) {
  case Verdict::Kind::Equivalent: return 0;
  case Verdict::Kind::NotEquivalent: return 1;
  case Verdict::Kind::Unknown: return 2;
  }
  return 2;
}

DivergenceReport validateCex(const miter::MiterModule &m, const Counterexample &cex) {
  std::map<std::string, std::string> implToSpec, specToImpl;
  for (const auto &p : m.ports.pairs) {
    implToSpec[p.impl] = p.spec;
    specToImpl[p.spec] = p.impl;
  }
  auto run = [&](const CoreModule &side, bool isSpec, unsigned frames) {
    std::vector<core::Frame> stimuli(frames);
    for (unsigned t = 0; t < frames; ++t)
      for (unsigned p : side.inputPorts()) {
        const auto &port = side.ports[p];
        auto it = implToSpec.find(port.name);
        const std::string &base = isSpec || it == implToSpec.end() ? port.name : it->second;
        stimuli[t][port.name] = lookup(cex, t, base, port.width);
      }
    return core::simulate(side, stimuli);
  };
  auto specOut = run(m.spec, true, m.specFrames);
  auto implOut = run(m.impl, false, m.implFrames);
  DivergenceReport r;
  for (const auto &c : m.compared) {
    OutputDiff d;
    d.port = c.port;
    d.specFrame = c.specFrame;
    d.implFrame = c.implFrame;
    d.spec = specOut.at(c.specFrame).at(c.port);
    d.impl = implOut.at(c.implFrame).at(specToImpl.at(c.port));
    d.differs = !(d.spec == d.impl);
    r.differs = r.differs || d.differs;
    r.outputs.push_back(std::move(d));
  }
  return r;
}

DivergenceReport validateCex(const CoreModule &spec, const CoreModule &impl, const miter::PortMap &pm,
                             const Counterexample &cex, const miter::MiterOptions &opts) {
  return validateCex(miter::buildMiter(spec, impl, pm, miter::MiterMode::Smtlib, opts), cex);
}

Verdict checkWithReplay(Verdict v, const miter::MiterModule &m) {
  if (v.kind != Verdict::Kind::NotEquivalent)
    return v;
  DivergenceReport r = validateCex(m, *v.cex);
  if (!r.differs)
    return Verdict::unknown(UnknownReason::ParseFailure, "counterexample does not replay as a divergence", v.engine);
  v.report = std::move(r);
  return v;
}

Verdict solveInternalEnum(const miter::MiterModule &m, unsigned bitLimit) {
  unsigned n = m.inputBits();
  if (n > bitLimit || n >= 64)
    return Verdict::unknown(UnknownReason::LimitExceeded,
                            std::to_string(n) + " input bits exceed the enumeration limit of " +
                                std::to_string(bitLimit),
                            "internal-enum");
  auto hit = enumerate(m.module);
  if (!hit)
    return Verdict::equivalent("internal-enum");
  return checkWithReplay(notEquivalent(backends::counterexampleFromBits(miterSymbols(m), *hit), "internal-enum"), m);
}

Verdict solveInternalEnum(const CoreModule &problem, const SymbolMap &symbols, unsigned bitLimit) {
  unsigned n = totalInputBits(problem);
  if (n > bitLimit || n >= 64)
    return Verdict::unknown(UnknownReason::LimitExceeded,
                            std::to_string(n) + " input bits exceed the enumeration limit of " +
                                std::to_string(bitLimit),
                            "internal-enum");
  auto hit = enumerate(problem);
  if (!hit)
    return Verdict::equivalent("internal-enum");
  return notEquivalent(backends::counterexampleFromBits(symbols, *hit), "internal-enum");
}

Verdict solveInternalSat(const core::Aig &a, const SymbolMap &symbols, const SatOptions &opts) {
  std::string engine = satEngineName(opts);
  SatResult r = solveCnf(backends::tseitin(a), opts);
  if (r.status == SatStatus::Unsat)
    return Verdict::equivalent(engine);
  if (r.status == SatStatus::Unknown)
    return Verdict::unknown(UnknownReason::LimitExceeded,
                            "conflict limit of " + std::to_string(opts.conflictLimit) + " reached", engine);
  std::vector<bool> bits;
  for (core::Lit in : a.inputs)
    bits.push_back(r.model.at(core::litVar(in)));
  if (!a.evaluate(bits).at(0))
    return Verdict::unknown(UnknownReason::SolverError, "SAT model does not drive the miter output", engine);
  return notEquivalent(backends::counterexampleFromBits(symbols, bits), engine);
}

Verdict solveInternalSat(const miter::MiterModule &m, const SatOptions &opts) {
  core::Aig a = m.aig ? *m.aig : miter::miterAig(m.module);
  return checkWithReplay(solveInternalSat(a, miterSymbols(m), opts), m);
}

Verdict solveInternalCnf(const backends::Cnf &cnf, const SymbolMap &symbols, const SatOptions &opts) {
  std::string engine = satEngineName(opts);
  SatResult r = solveCnf(cnf, opts);
  if (r.status == SatStatus::Unsat)
    return Verdict::equivalent(engine);
  if (r.status == SatStatus::Unknown)
    return Verdict::unknown(UnknownReason::LimitExceeded,
                            "conflict limit of " + std::to_string(opts.conflictLimit) + " reached", engine);
  std::vector<bool> bits;
  for (const auto &s : symbols.inputs) {
    std::size_t first = std::stoul(s.id);
    for (unsigned b = 0; b < s.width; ++b)
      bits.push_back(first + b < r.model.size() && r.model[first + b]);
  }
  return notEquivalent(backends::counterexampleFromBits(symbols, bits), engine);
}

RawProblem readRawProblem(Format f, std::string_view bytes) {
  RawProblem p;
  p.format = f;
  switch (f) {
  case Format::Smtlib:
    p.module = backends::readSmtlibProblem(bytes);
    p.symbols = backends::rawSymbols(f, *p.module);
    break;
  case Format::Btor2:
    p.module = backends::readBtor2Problem(bytes);
    p.symbols = backends::rawSymbols(f, *p.module);
    break;
  case Format::Aiger:
  case Format::AigerBinary:
    p.aig = backends::readAiger(bytes);
    if (p.aig->outputs.size() != 1)
      fail(ErrorKind::ParseFailure, "AIGER miter must have one output, has " + std::to_string(p.aig->outputs.size()));
    p.format = bytes.substr(0, 3) == "aig" ? Format::AigerBinary : Format::Aiger;
    p.symbols = backends::rawSymbols(*p.aig, p.format == Format::AigerBinary);
    break;
  case Format::Dimacs:
    p.cnf = backends::readDimacs(bytes);
    p.symbols = backends::rawSymbols(*p.cnf, bytes);
    break;
  }
  return p;
}

bool satisfiesRaw(const RawProblem &p, const SymbolMap &symbols, const Counterexample &cex) {
  std::vector<bool> bits = cexBits(symbols, cex);
  if (p.module)
    return !core::Evaluator(*p.module).step(portValues(*p.module, bits)).at(0).isZero();
  if (p.aig) {
    bits.resize(p.aig->inputs.size(), false);
    return p.aig->evaluate(bits).at(0);
  }
  backends::Cnf fixed = *p.cnf;
  std::size_t pos = 0;
  for (const auto &s : symbols.inputs) {
    int first = std::stoi(s.id);
    for (unsigned b = 0; b < s.width; ++b, ++pos) {
      int v = first + static_cast<int>(b);
      fixed.clauses.push_back({bits[pos] ? v : -v});
      fixed.numVars = std::max(fixed.numVars, v);
    }
  }
  return solveCnf(fixed).status == SatStatus::Sat;
}

Verdict solveRawProblem(const RawProblem &p, const SymbolMap &symbols, const InternalOptions &opts) {
  SatOptions so;
  so.algorithm = opts.engine == InternalOptions::Engine::Dpll ? SatAlgorithm::Dpll : SatAlgorithm::Cdcl;
  so.conflictLimit = opts.conflictLimit;
  if (p.cnf) {
    if (opts.engine == InternalOptions::Engine::Enum)
      return Verdict::unknown(UnknownReason::SolverError, "enumeration needs a circuit, not a CNF", "internal-enum");
    return solveInternalCnf(*p.cnf, symbols, so);
  }
  if (opts.engine == InternalOptions::Engine::Enum) {
    if (p.module)
      return solveInternalEnum(*p.module, symbols, opts.bitLimit);
    // Enumerate the AIG through a one-bit-per-input module view.
    unsigned n = static_cast<unsigned>(p.aig->inputs.size());
    if (n > opts.bitLimit || n >= 64)
      return Verdict::unknown(UnknownReason::LimitExceeded,
                              std::to_string(n) + " input bits exceed the enumeration limit of " +
                                  std::to_string(opts.bitLimit),
                              "internal-enum");
    std::vector<bool> bits(n);
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
      for (unsigned b = 0; b < n; ++b)
        bits[b] = (x >> b) & 1;
      if (p.aig->evaluate(bits).at(0))
        return notEquivalent(backends::counterexampleFromBits(symbols, bits), "internal-enum");
    }
    return Verdict::equivalent("internal-enum");
  }
  if (p.aig)
    return solveInternalSat(*p.aig, symbols, so);
  return solveInternalSat(core::bitBlast(*p.module).aig, symbols, so);
}

} // namespace equivfuse::solve
