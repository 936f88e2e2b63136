#include "equivfuse/miter/miter.h"

#include "equivfuse/core/passes.h"
#include "equivfuse/support/error.h"

#include <algorithm>
#include <map>
#include <set>

namespace equivfuse::miter {

using core::CoreModule;
using core::NodeId;
using core::PortDir;

std::string_view modeName(MiterMode mode) {
  switch (mode) {
  case MiterMode::Smtlib: return "smtlib";
  case MiterMode::Btor2: return "btor2";
  case MiterMode::Aiger: return "aiger";
  }
  return "?";
}

MiterMode parseMode(std::string_view text) {
  if (text == "smtlib" || text == "smt2" || text == "smt")
    return MiterMode::Smtlib;
  if (text == "btor2" || text == "btor")
    return MiterMode::Btor2;
  if (text == "aiger" || text == "aig" || text == "aag")
    return MiterMode::Aiger;
  fail(ErrorKind::Usage, "unknown miter mode '" + std::string(text) + "' (expected smtlib, btor2 or aiger)");
}

CompareFrames CompareFrames::parse(std::string_view text) {
  CompareFrames c;
  if (text == "last")
    return c;
  if (text == "all") {
    c.kind = Kind::All;
    return c;
  }
  c.kind = Kind::List;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string_view::npos)
      fail(ErrorKind::Usage, "bad --compare-frames value '" + std::string(text) + "' (expected last, all or t0,t1,...)");
    c.frames.push_back(static_cast<unsigned>(std::stoul(std::string(item))));
    if (comma == std::string_view::npos)
      break;
    pos = comma + 1;
  }
  std::sort(c.frames.begin(), c.frames.end());
  c.frames.erase(std::unique(c.frames.begin(), c.frames.end()), c.frames.end());
  return c;
}

namespace {

const char *dirName(PortDir d) { return d == PortDir::In ? "input" : "output"; }

} // namespace

PortMap matchPorts(const CoreModule &spec, const CoreModule &impl) {
  if (spec.ports.size() != impl.ports.size())
    fail(ErrorKind::CountMismatch, "port count differs: spec " + spec.name + " has " +
                                       std::to_string(spec.ports.size()) + ", impl " + impl.name + " has " +
                                       std::to_string(impl.ports.size()));
  // Names are visited in sorted order so that swapping sides reports the
  // same port with mirrored labels.
  std::set<std::string> names;
  for (const auto &p : spec.ports)
    names.insert(p.name);
  for (const auto &p : impl.ports)
    names.insert(p.name);
  for (const auto &n : names) {
    auto s = spec.findPort(n), i = impl.findPort(n);
    if (!s || !i)
      fail(ErrorKind::NameMissing, std::string(!s ? "spec " + spec.name : "impl " + impl.name) +
                                       " has no port named " + n);
    const auto &sp = spec.ports[*s], &ip = impl.ports[*i];
    if (sp.dir != ip.dir)
      fail(ErrorKind::DirectionMismatch, "port " + n + " is an " + dirName(sp.dir) + " in spec but an " +
                                             dirName(ip.dir) + " in impl");
    if (sp.width != ip.width)
      fail(ErrorKind::WidthMismatch, "port " + n + " is " + std::to_string(sp.width) + " bits in spec but " +
                                         std::to_string(ip.width) + " bits in impl");
  }
  PortMap pm;
  for (const auto &p : spec.ports)
    pm.pairs.push_back({p.name, p.name, p.dir, p.width});
  return pm;
}

void renamePort(CoreModule &m, const std::string &from, const std::string &to) {
  auto idx = m.findPort(from);
  if (!idx)
    fail(ErrorKind::NameMissing, m.name + " has no port named " + from);
  if (from != to && m.findPort(to))
    fail(ErrorKind::DuplicateDefinition, m.name + " already has a port named " + to);
  m.ports[*idx].name = to;
}

unsigned MiterModule::inputBits() const {
  unsigned n = 0;
  for (const auto &in : inputs)
    n += in.width;
  return n;
}

namespace {

/// Copies every node of `m` into `b`, mapping Input nodes through `inputs`
/// (indexed by port). Returns the node map.
std::vector<NodeId> inlineModule(core::ModuleBuilder &b, const CoreModule &m, const std::vector<NodeId> &inputs) {
  std::vector<NodeId> map(m.nodes.size(), 0);
  for (NodeId i = 0; i < m.nodes.size(); ++i) {
    const core::Node &n = m.nodes[i];
    switch (n.op) {
    case core::Op::Input: map[i] = inputs.at(n.aux); break;
    case core::Op::Const: map[i] = b.constant(n.value); break;
    case core::Op::Reg: fail(ErrorKind::HasState, m.name + " still has registers");
    default: {
      core::Args args;
      for (NodeId a : n.args)
        args.push_back(map[a]);
      map[i] = b.op(n.op, args, n.aux, n.width);
    }
    }
  }
  return map;
}

std::string splitFrame(const std::string &name, unsigned &frame) {
  auto at = name.rfind('@');
  frame = static_cast<unsigned>(std::stoul(name.substr(at + 1)));
  return name.substr(0, at);
}

} // namespace

core::Aig miterAig(const CoreModule &miter) {
  auto blast = core::bitBlast(miter);
  if (blast.aig.outputs.size() != 1)
    fail(ErrorKind::MultiOutput, "miter AIG must have one output, has " + std::to_string(blast.aig.outputs.size()));
  return std::move(blast.aig);
}

namespace {

/// ORs every output bit of `pair` (one XOR word per compared pair) inside a
/// fresh AIG with the same inputs.
core::Aig xorTreeAig(const CoreModule &pair) {
  auto blast = core::bitBlast(pair);
  const core::Aig &src = blast.aig;
  core::AigBuilder b;
  std::vector<core::Lit> map(src.numVars + 1, core::kFalse);
  for (std::size_t i = 0; i < src.inputs.size(); ++i)
    map[core::litVar(src.inputs[i])] = b.input(src.inputNames[i]);
  auto lit = [&](core::Lit l) {
    core::Lit base = map[core::litVar(l)];
    return core::litNegated(l) ? core::litNot(base) : base;
  };
  for (const auto &g : src.ands)
    map[core::litVar(g.lhs)] = b.land(lit(g.rhs0), lit(g.rhs1));
  core::Lit neq = core::kFalse;
  for (core::Lit o : src.outputs)
    neq = b.lor(neq, lit(o));
  b.output(neq, "neq");
  return b.finish();
}

} // namespace

MiterModule buildMiter(const CoreModule &spec, const CoreModule &impl, const PortMap &pm, MiterMode mode,
                       const MiterOptions &opts) {
  MiterModule out;
  out.specName = spec.name;
  out.implName = impl.name;
  out.mode = mode;
  out.ports = pm;
  out.spec = spec;
  out.impl = impl;
  out.sequential = !spec.isCombinational() || !impl.isCombinational();

  CoreModule s = spec, i = impl;
  if (out.sequential) {
    auto ks = opts.specK ? opts.specK : opts.k;
    auto ki = opts.implK ? opts.implK : opts.k;
    if (!ks || !ki)
      fail(ErrorKind::NeedsUnrollDepth, std::string(spec.isCombinational() ? "impl " + impl.name : "spec " + spec.name) +
                                            " has registers; give an unroll depth with -k (or --spec-k/--impl-k)");
    if (*ks == 0 || *ki == 0)
      fail(ErrorKind::Usage, "unroll depth must be at least 1");
    out.specFrames = *ks;
    out.implFrames = *ki;
    s = core::unrollSequential(spec, *ks);
    i = core::unrollSequential(impl, *ki);
  }

  // Compared outputs.
  std::vector<std::pair<unsigned, unsigned>> framePairs;
  if (!out.sequential) {
    framePairs.push_back({0, 0});
  } else if (opts.compare.kind == CompareFrames::Kind::Last) {
    framePairs.push_back({out.specFrames - 1, out.implFrames - 1});
  } else {
    if (out.specFrames != out.implFrames)
      fail(ErrorKind::Usage, "--compare-frames all/list needs equal unroll depths on both sides");
    if (opts.compare.kind == CompareFrames::Kind::All) {
      for (unsigned t = 0; t < out.specFrames; ++t)
        framePairs.push_back({t, t});
    } else {
      for (unsigned t : opts.compare.frames) {
        if (t >= out.specFrames)
          fail(ErrorKind::Usage, "compared frame " + std::to_string(t) + " is not below the unroll depth " +
                                     std::to_string(out.specFrames));
        framePairs.push_back({t, t});
      }
    }
  }
  for (const auto &[ts, ti] : framePairs)
    for (const auto &p : pm.pairs)
      if (p.dir == PortDir::Out)
        out.compared.push_back({out.sequential ? core::framePortName(p.spec, ts) : p.spec,
                                out.sequential ? core::framePortName(p.impl, ti) : p.impl, p.spec, ts, ti, p.width});

  // Shared inputs: spec input ports in order, then impl-only frames.
  std::map<std::string, std::string> implToSpec;
  for (const auto &p : pm.pairs)
    implToSpec[p.impl] = p.spec;
  std::map<std::string, std::size_t> shared;  // key: spec base name @ frame
  auto key = [](const std::string &base, unsigned f) { return base + "@" + std::to_string(f); };
  for (unsigned p : s.inputPorts()) {
    SharedInput in;
    in.name = s.ports[p].name;
    in.width = s.ports[p].width;
    in.port = out.sequential ? splitFrame(in.name, in.frame) : in.name;
    shared[key(in.port, in.frame)] = out.inputs.size();
    out.inputs.push_back(in);
  }
  std::vector<std::size_t> implInput(i.ports.size(), 0);
  for (unsigned p : i.inputPorts()) {
    unsigned frame = 0;
    std::string base = out.sequential ? splitFrame(i.ports[p].name, frame) : i.ports[p].name;
    std::string specBase = implToSpec.at(base);
    auto it = shared.find(key(specBase, frame));
    if (it == shared.end()) {
      SharedInput in{out.sequential ? core::framePortName(specBase, frame) : specBase, specBase, frame, i.ports[p].width};
      it = shared.emplace(key(specBase, frame), out.inputs.size()).first;
      out.inputs.push_back(in);
    }
    implInput[p] = it->second;
  }

  // Word-level miter, and for aiger mode the XOR pair module.
  auto assemble = [&](bool bitLevel) {
    core::ModuleBuilder b("miter_" + spec.name + "_" + impl.name);
    std::vector<NodeId> ins;
    for (const auto &in : out.inputs)
      ins.push_back(b.input(in.name, in.width));
    std::vector<NodeId> sIn(s.ports.size(), 0), iIn(i.ports.size(), 0);
    std::size_t next = 0;
    for (unsigned p : s.inputPorts())
      sIn[p] = ins[next++];
    for (unsigned p : i.inputPorts())
      iIn[p] = ins[implInput[p]];
    auto sMap = inlineModule(b, s, sIn);
    auto iMap = inlineModule(b, i, iIn);
    std::optional<NodeId> neq;
    for (std::size_t c = 0; c < out.compared.size(); ++c) {
      const auto &cmp = out.compared[c];
      NodeId a = sMap[s.ports[*s.findPort(cmp.spec)].node];
      NodeId z = iMap[i.ports[*i.findPort(cmp.impl)].node];
      if (bitLevel) {
        b.output("diff" + std::to_string(c), b.bitXor(a, z));
      } else {
        NodeId d = b.ne(a, z);
        neq = neq ? b.bitOr(*neq, d) : d;
      }
    }
    if (!bitLevel)
      b.output("neq", neq ? *neq : b.constant(1, 0));
    return core::constFold(b.finish());
  };
  out.module = assemble(false);
  if (mode == MiterMode::Aiger)
    out.aig = out.compared.empty() ? miterAig(out.module) : xorTreeAig(assemble(true));
  return out;
}

} // namespace equivfuse::miter
