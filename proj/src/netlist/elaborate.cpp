#include "equivfuse/netlist/netlist.h"

#include "equivfuse/support/error.h"

#include <algorithm>
#include <functional>
#include <set>

namespace equivfuse::netlist {

namespace {

/// A bit operand: a net bit, or a constant when `bit < 0`.
struct Ref {
  int32_t bit = -1;
  bool value = false;
};

enum class Drv { None, Const, Alias, Cell, Input, Reg };

struct Bit {
  std::string name;
  Drv kind = Drv::None;
  bool value = false;
  uint32_t src = 0;  // Alias: bit; Cell/Reg: cell; Input: port
  unsigned sub = 0;  // Input: bit index
};

struct Net {
  int msb = 0, lsb = 0;
  std::vector<uint32_t> bits;  // LSB first
  bool isWire = false;
  unsigned line = 0;
};

struct CellInst {
  const CellDef *def = nullptr;
  std::string name;
  std::vector<Ref> in;  // per def->inputs
  std::string where;
};

using Scope = std::map<std::string, Net, std::less<>>;

class Flattener {
 public:
  Flattener(const std::vector<NetlistModule> &mods, const CellLibrary &lib, std::vector<std::string> *warnings)
      : lib_(lib), warnings_(warnings) {
    for (const auto &m : mods)
      mods_[m.name] = &m;
  }

  core::CoreModule run(const std::string &top) {
    auto it = mods_.find(top);
    if (it == mods_.end()) {
      std::string known;
      for (const auto &[n, _] : mods_)
        known += (known.empty() ? "" : ", ") + n;
      fail(ErrorKind::TopNotFound, "module " + top + " not found (known: " + (known.empty() ? "none" : known) + ")");
    }
    const NetlistModule &m = *it->second;
    std::vector<std::string> stack;
    Scope scope = instantiate(m, "", stack);
    for (std::size_t p = 0; p < m.ports.size(); ++p) {
      if (m.ports[p].dir != PinDir::In)
        continue;
      const Net &net = scope.at(m.ports[p].net.name);
      for (unsigned i = 0; i < net.bits.size(); ++i) {
        Bit &b = bits_[net.bits[i]];
        if (b.kind != Drv::None)
          multiple(net.bits[i], "input port " + m.ports[p].net.name);
        b.kind = Drv::Input;
        b.src = static_cast<uint32_t>(p);
        b.sub = i;
      }
    }
    return build(m, scope);
  }

 private:
  void warn(const std::string &w) {
    if (warnings_)
      warnings_->push_back(w);
  }

  static std::string where(const NetlistModule &m, unsigned line) {
    return formatLoc(m.file, {line, 1});
  }

  std::string describe(uint32_t bit) const {
    const Bit &b = bits_[bit];
    switch (b.kind) {
    case Drv::Const: return "a constant";
    case Drv::Alias: return bits_[b.src].name;
    case Drv::Cell:
    case Drv::Reg: return "cell " + cells_[b.src].name;
    case Drv::Input: return "an input port";
    case Drv::None: break;
    }
    return "nothing";
  }

  [[noreturn]] void multiple(uint32_t bit, const std::string &second) {
    fail(ErrorKind::MultipleDrivers,
         "net " + bits_[bit].name + " is driven by " + describe(bit) + " and by " + second);
  }

  void drive(uint32_t bit, Ref src, Drv kind, uint32_t cell, const std::string &what) {
    Bit &b = bits_[bit];
    if (b.kind != Drv::None)
      multiple(bit, what);
    if (kind == Drv::Alias && src.bit < 0) {
      b.kind = Drv::Const;
      b.value = src.value;
    } else if (kind == Drv::Alias) {
      b.kind = Drv::Alias;
      b.src = static_cast<uint32_t>(src.bit);
    } else {
      b.kind = kind;
      b.src = cell;
    }
  }

  void declare(Scope &scope, const std::string &prefix, const NetDecl &d, bool isWire, unsigned line) {
    Net net;
    net.msb = d.msb;
    net.lsb = d.lsb;
    net.isWire = isWire;
    net.line = line;
    unsigned w = d.width();
    for (unsigned i = 0; i < w; ++i) {
      Bit b;
      b.name = prefix + d.name;
      if (w > 1 || d.msb != 0)
        b.name += "[" + std::to_string(d.msb >= d.lsb ? d.lsb + static_cast<int>(i) : d.lsb - static_cast<int>(i)) + "]";
      net.bits.push_back(static_cast<uint32_t>(bits_.size()));
      bits_.push_back(std::move(b));
    }
    scope[d.name] = std::move(net);
  }

  const Net &lookup(const Scope &scope, const NetlistModule &m, const std::string &name, unsigned line) {
    auto it = scope.find(name);
    if (it == scope.end())
      fail(ErrorKind::UseBeforeDecl, where(m, line) + ": net " + name + " is not declared in " + m.name);
    return it->second;
  }

  uint32_t select(const Net &net, const NetlistModule &m, const std::string &name, int idx, unsigned line) {
    int lo = std::min(net.msb, net.lsb), hi = std::max(net.msb, net.lsb);
    if (idx < lo || idx > hi)
      fail(ErrorKind::StaticOutOfBounds, where(m, line) + ": index " + std::to_string(idx) + " outside " + name +
                                             "[" + std::to_string(net.msb) + ":" + std::to_string(net.lsb) + "]");
    return net.bits[static_cast<std::size_t>(net.msb >= net.lsb ? idx - net.lsb : net.lsb - idx)];
  }

  /// LSB-first bits of `e`; an unsized constant takes `target` bits.
  std::vector<Ref> bitsOf(const Scope &scope, const NetlistModule &m, const NetExpr &e,
                          std::optional<unsigned> target = std::nullopt) {
    std::vector<Ref> out;
    switch (e.kind) {
    case NetExpr::Kind::Const: {
      BitVec v = (!e.sized && target) ? e.value.resize(*target, false) : e.value;
      for (unsigned i = 0; i < v.width(); ++i)
        out.push_back({-1, v.bit(i)});
      break;
    }
    case NetExpr::Kind::Ident:
      for (uint32_t b : lookup(scope, m, e.name, e.line).bits)
        out.push_back({static_cast<int32_t>(b), false});
      break;
    case NetExpr::Kind::Bit: {
      const Net &net = lookup(scope, m, e.name, e.line);
      out.push_back({static_cast<int32_t>(select(net, m, e.name, e.msb, e.line)), false});
      break;
    }
    case NetExpr::Kind::Part: {
      const Net &net = lookup(scope, m, e.name, e.line);
      int step = e.msb >= e.lsb ? 1 : -1;
      for (int i = e.lsb;; i += step) {
        out.push_back({static_cast<int32_t>(select(net, m, e.name, i, e.line)), false});
        if (i == e.msb)
          break;
      }
      break;
    }
    case NetExpr::Kind::Concat:
      for (auto it = e.parts.rbegin(); it != e.parts.rend(); ++it) {
        auto part = bitsOf(scope, m, *it);
        out.insert(out.end(), part.begin(), part.end());
      }
      break;
    case NetExpr::Kind::Repeat: {
      auto part = bitsOf(scope, m, e.parts.at(0));
      for (int i = 0; i < e.msb; ++i)
        out.insert(out.end(), part.begin(), part.end());
      break;
    }
    }
    return out;
  }

  std::vector<uint32_t> lvalue(const Scope &scope, const NetlistModule &m, const NetExpr &e) {
    std::vector<uint32_t> out;
    for (Ref r : bitsOf(scope, m, e)) {
      if (r.bit < 0)
        fail(ErrorKind::SyntaxError, where(m, e.line) + ": a constant cannot be driven");
      out.push_back(static_cast<uint32_t>(r.bit));
    }
    return out;
  }

  Scope instantiate(const NetlistModule &m, const std::string &prefix, std::vector<std::string> &stack) {
    if (std::find(stack.begin(), stack.end(), m.name) != stack.end())
      fail(ErrorKind::UnsupportedConstruct, "recursive instantiation of " + m.name);
    stack.push_back(m.name);
    Scope scope;
    for (const auto &p : m.ports)
      declare(scope, prefix, p.net, false, m.line);
    for (const auto &w : m.wires)
      declare(scope, prefix, w, true, m.line);

    for (const auto &a : m.assigns) {
      auto lhs = lvalue(scope, m, a.lhs);
      auto rhs = bitsOf(scope, m, a.rhs, static_cast<unsigned>(lhs.size()));
      if (lhs.size() != rhs.size())
        fail(ErrorKind::WidthMismatch, where(m, a.line) + ": assign of " + std::to_string(rhs.size()) +
                                           " bits to " + std::to_string(lhs.size()) + " bits");
      for (std::size_t i = 0; i < lhs.size(); ++i)
        drive(lhs[i], rhs[i], Drv::Alias, 0, "an assign at " + where(m, a.line));
    }

    for (const auto &inst : m.instances) {
      std::string at = where(m, inst.line);
      std::set<std::string> seen;
      for (const auto &[pin, _] : inst.connections)
        if (!seen.insert(pin).second)
          fail(ErrorKind::DuplicateDefinition, at + ": pin " + pin + " of " + inst.name + " connected twice");
      auto conn = [&](const std::string &pin) -> const std::optional<NetExpr> * {
        for (const auto &c : inst.connections)
          if (c.first == pin)
            return &c.second;
        return nullptr;
      };
      std::string hier = prefix + inst.name;
      if (const CellDef *def = lib_.find(inst.cell)) {
        for (const auto &pin : seen)
          if (pin != def->output && std::find(def->inputs.begin(), def->inputs.end(), pin) == def->inputs.end())
            fail(ErrorKind::UnknownCell, at + ": cell " + def->name + " has no pin " + pin);
        CellInst c;
        c.def = def;
        c.name = hier;
        c.where = at;
        for (const auto &pin : def->inputs) {
          const auto *e = conn(pin);
          if (!e || !*e)
            fail(ErrorKind::UnconnectedPin, at + ": input pin " + pin + " of " + hier + " (" + def->name +
                                                ") is not connected");
          auto bits = bitsOf(scope, m, **e, 1u);
          if (bits.size() != 1)
            fail(ErrorKind::WidthMismatch, at + ": pin " + pin + " of " + hier + " connects " +
                                               std::to_string(bits.size()) + " bits to a 1-bit pin");
          c.in.push_back(bits[0]);
        }
        uint32_t idx = static_cast<uint32_t>(cells_.size());
        cells_.push_back(std::move(c));
        const auto *out = conn(def->output);
        if (out && *out) {
          auto bits = lvalue(scope, m, **out);
          if (bits.size() != 1)
            fail(ErrorKind::WidthMismatch, at + ": pin " + def->output + " of " + hier + " connects " +
                                               std::to_string(bits.size()) + " bits to a 1-bit pin");
          drive(bits[0], {}, def->isRegister ? Drv::Reg : Drv::Cell, idx, "cell " + hier);
        }
        continue;
      }
      auto sub = mods_.find(inst.cell);
      if (sub == mods_.end())
        fail(ErrorKind::UnknownCell, at + ": " + inst.cell + " is neither a library cell nor a module");
      const NetlistModule &child = *sub->second;
      for (const auto &pin : seen)
        if (std::none_of(child.ports.begin(), child.ports.end(), [&](const PortDecl &p) { return p.net.name == pin; }))
          fail(ErrorKind::UnknownCell, at + ": module " + child.name + " has no port " + pin);
      Scope inner = instantiate(child, hier + ".", stack);
      for (const auto &p : child.ports) {
        const auto &childBits = inner.at(p.net.name).bits;
        const auto *e = conn(p.net.name);
        if (!e || !*e) {
          if (p.dir == PinDir::In)
            fail(ErrorKind::UnconnectedPin, at + ": input port " + p.net.name + " of " + hier + " (" +
                                                child.name + ") is not connected");
          continue;
        }
        auto check = [&](std::size_t n) {
          if (n != childBits.size())
            fail(ErrorKind::WidthMismatch, at + ": port " + p.net.name + " of " + hier + " is " +
                                               std::to_string(childBits.size()) + " bits, connection is " +
                                               std::to_string(n));
        };
        if (p.dir == PinDir::In) {
          auto src = bitsOf(scope, m, **e, static_cast<unsigned>(childBits.size()));
          check(src.size());
          for (std::size_t i = 0; i < src.size(); ++i)
            drive(childBits[i], src[i], Drv::Alias, 0, "the connection at " + at);
        } else {
          auto dst = lvalue(scope, m, **e);
          check(dst.size());
          for (std::size_t i = 0; i < dst.size(); ++i)
            drive(dst[i], {static_cast<int32_t>(childBits[i]), false}, Drv::Alias, 0, "port " + hier + "." + p.net.name);
        }
      }
      for (auto &[name, net] : inner)
        if (net.isWire)
          childWires_.push_back({hier + "." + name, std::move(net)});
    }
    stack.pop_back();
    return scope;
  }

  core::NodeId bitNode(Ref r) {
    return r.bit < 0 ? b_->constant(1, r.value ? 1 : 0) : eval(static_cast<uint32_t>(r.bit));
  }

  core::NodeId function(const CellFunction &f, const CellInst &c) {
    switch (f.kind) {
    case CellFunction::Kind::Const: return b_->constant(1, f.value ? 1 : 0);
    case CellFunction::Kind::Pin: {
      auto it = std::find(c.def->inputs.begin(), c.def->inputs.end(), f.pin);
      return bitNode(c.in[static_cast<std::size_t>(it - c.def->inputs.begin())]);
    }
    case CellFunction::Kind::Not: return b_->bitNot(function(f.args[0], c));
    default: break;
    }
    core::NodeId acc = function(f.args[0], c);
    for (std::size_t i = 1; i < f.args.size(); ++i) {
      core::NodeId x = function(f.args[i], c);
      acc = f.kind == CellFunction::Kind::And ? b_->bitAnd(acc, x)
          : f.kind == CellFunction::Kind::Or  ? b_->bitOr(acc, x)
                                              : b_->bitXor(acc, x);
    }
    return acc;
  }

  core::NodeId eval(uint32_t bit) {
    if (state_[bit] == 2)
      return memo_[bit];
    if (state_[bit] == 1) {
      std::string trace;
      auto from = std::find(path_.begin(), path_.end(), bit);
      for (auto it = from; it != path_.end(); ++it)
        trace += bits_[*it].name + " -> ";
      fail(ErrorKind::CombinationalLoop, "combinational loop: " + trace + bits_[bit].name);
    }
    state_[bit] = 1;
    path_.push_back(bit);
    const Bit &b = bits_[bit];
    core::NodeId n = 0;
    switch (b.kind) {
    case Drv::None:
      fail(ErrorKind::UndrivenNet, "net " + b.name + " is read but never driven");
    case Drv::Const: n = b_->constant(1, b.value ? 1 : 0); break;
    case Drv::Alias: n = eval(b.src); break;
    case Drv::Input: {
      core::NodeId in = inputs_.at(b.src);
      n = b_->width(in) == 1 ? in : b_->extract(in, b.sub, b.sub);
      break;
    }
    case Drv::Reg: n = regs_.at(b.src); break;
    case Drv::Cell: n = function(*cells_[b.src].def->function, cells_[b.src]); break;
    }
    path_.pop_back();
    state_[bit] = 2;
    memo_[bit] = n;
    return n;
  }

  Ref root(Ref r) const {
    while (r.bit >= 0) {
      const Bit &b = bits_[static_cast<std::size_t>(r.bit)];
      if (b.kind == Drv::Alias)
        r.bit = static_cast<int32_t>(b.src);
      else if (b.kind == Drv::Const)
        return {-1, b.value};
      else
        break;
    }
    return r;
  }

  core::CoreModule build(const NetlistModule &m, const Scope &scope) {
    core::ModuleBuilder builder(m.name);
    b_ = &builder;
    state_.assign(bits_.size(), 0);
    memo_.assign(bits_.size(), 0);
    for (const auto &p : m.ports)
      inputs_.push_back(p.dir == PinDir::In ? builder.input(p.net.name, p.net.width()) : 0);

    std::set<std::pair<int32_t, bool>> clocks;
    for (uint32_t i = 0; i < cells_.size(); ++i) {
      const CellInst &c = cells_[i];
      if (!c.def->isRegister)
        continue;
      regs_[i] = builder.reg(c.name, 1, BitVec(1, 0));
      auto pin = [&](const std::string &name) {
        auto it = std::find(c.def->inputs.begin(), c.def->inputs.end(), name);
        return c.in[static_cast<std::size_t>(it - c.def->inputs.begin())];
      };
      Ref clk = root(pin(c.def->clock));
      clocks.insert({clk.bit, clk.value});
    }
    if (clocks.size() > 1)
      warn(m.name + ": registers use " + std::to_string(clocks.size()) +
           " distinct clock nets; all are treated as one clock");

    for (const auto &p : m.ports) {
      if (p.dir != PinDir::Out)
        continue;
      std::vector<core::NodeId> parts;
      for (uint32_t bit : scope.at(p.net.name).bits)
        parts.push_back(eval(bit));
      builder.output(p.net.name, builder.concatLsbFirst(parts));
    }
    for (const auto &[i, node] : regs_) {
      const CellInst &c = cells_[i];
      auto pin = [&](const std::string &name) {
        auto it = std::find(c.def->inputs.begin(), c.def->inputs.end(), name);
        return bitNode(c.in[static_cast<std::size_t>(it - c.def->inputs.begin())]);
      };
      core::NodeId next = pin(c.def->data);
      if (!c.def->reset.empty())
        next = builder.mux(pin(c.def->reset), builder.constant(1, 0), next);
      if (!c.def->set.empty())
        next = builder.mux(pin(c.def->set), builder.constant(1, 1), next);
      builder.setNext(node, next);
    }

    std::vector<std::pair<std::string, const Net *>> wires;
    for (const auto &[name, net] : scope)
      if (net.isWire)
        wires.push_back({name, &net});
    for (const auto &[name, net] : childWires_)
      wires.push_back({name, &net});
    for (const auto &[name, net] : wires)
      if (std::none_of(net->bits.begin(), net->bits.end(), [&](uint32_t b) { return state_[b] == 2; }))
        warn(m.name + ": wire " + name + " drives nothing; pruned");
    std::size_t deadCells = 0;
    for (uint32_t i = 0; i < bits_.size(); ++i)
      if (bits_[i].kind == Drv::Cell && state_[i] != 2)
        ++deadCells;
    if (deadCells)
      warn(m.name + ": " + std::to_string(deadCells) + " cell(s) drive nothing; pruned");
    b_ = nullptr;
    return builder.finish();
  }

  const CellLibrary &lib_;
  std::vector<std::string> *warnings_;
  std::map<std::string, const NetlistModule *, std::less<>> mods_;
  std::vector<Bit> bits_;
  std::vector<CellInst> cells_;
  std::vector<std::pair<std::string, Net>> childWires_;

  core::ModuleBuilder *b_ = nullptr;
  std::vector<uint8_t> state_;
  std::vector<core::NodeId> memo_;
  std::vector<uint32_t> path_;
  std::vector<core::NodeId> inputs_;
  std::map<uint32_t, core::NodeId> regs_;
};

} // namespace

core::CoreModule elaborate(const std::vector<NetlistModule> &modules, const std::string &top,
                           const CellLibrary &lib, std::vector<std::string> *warnings) {
  return Flattener(modules, lib, warnings).run(top);
}

} // namespace equivfuse::netlist
