#include "equivfuse/core/aig.h"

#include "equivfuse/support/error.h"

#include <utility>

namespace equivfuse::core {

namespace {

[[noreturn]] void invalid(const std::string &msg) { fail(ErrorKind::InvalidModule, msg); }

std::string bitName(const std::string &port, unsigned width, unsigned bit) {
  return width == 1 ? port : port + "[" + std::to_string(bit) + "]";
}

} // namespace

void Aig::validate() const {
  const uint32_t i = static_cast<uint32_t>(inputs.size());
  const uint32_t l = static_cast<uint32_t>(latches.size());
  if (numVars != i + l + ands.size())
    invalid("AIG variable count " + std::to_string(numVars) + " differs from I+L+A");
  for (uint32_t k = 0; k < i; ++k)
    if (inputs[k] != litOf(k + 1))
      invalid("AIG input " + std::to_string(k) + " is not literal " + std::to_string(litOf(k + 1)));
  for (uint32_t k = 0; k < l; ++k)
    if (latches[k].current != litOf(i + k + 1) || latches[k].next > 2 * numVars + 1)
      invalid("AIG latch " + std::to_string(k) + " is misnumbered");
  for (std::size_t k = 0; k < ands.size(); ++k) {
    const AndGate &g = ands[k];
    if (g.lhs != litOf(static_cast<uint32_t>(i + l + k + 1)))
      invalid("AND gate " + std::to_string(k) + " has lhs " + std::to_string(g.lhs));
    if (g.rhs0 >= g.lhs || g.rhs1 >= g.lhs)
      invalid("AND gate " + std::to_string(g.lhs) + " is not topologically ordered");
  }
  for (Lit o : outputs)
    if (o > 2 * numVars + 1)
      invalid("AIG output literal " + std::to_string(o) + " out of range");
}

std::vector<bool> Aig::evaluate(const std::vector<bool> &inputValues) const {
  if (inputValues.size() != inputs.size())
    invalid("AIG expects " + std::to_string(inputs.size()) + " input bits");
  std::vector<char> v(numVars + 1, 0);
  auto lit = [&](Lit x) { return static_cast<bool>(v[litVar(x)] ^ litNegated(x)); };
  for (std::size_t k = 0; k < inputs.size(); ++k)
    v[litVar(inputs[k])] = inputValues[k];
  for (const auto &la : latches)
    v[litVar(la.current)] = la.init;
  for (const auto &g : ands)
    v[litVar(g.lhs)] = lit(g.rhs0) && lit(g.rhs1);
  std::vector<bool> out;
  for (Lit o : outputs)
    out.push_back(lit(o));
  return out;
}

// ---- builder ------------------------------------------------------------------

Lit AigBuilder::input(const std::string &name) {
  if (!aig_.ands.empty())
    invalid("AIG inputs must precede AND gates");
  Lit l = litOf(++aig_.numVars);
  aig_.inputs.push_back(l);
  aig_.inputNames.push_back(name);
  return l;
}

Lit AigBuilder::land(Lit a, Lit b) {
  if (a > b)
    std::swap(a, b);
  if (a == kFalse)
    return kFalse;
  if (a == kTrue || a == b)
    return b;
  if (a == litNot(b))
    return kFalse;
  uint64_t key = (uint64_t{a} << 32) | b;
  auto it = strash_.find(key);
  if (it != strash_.end())
    return it->second;
  Lit lhs = litOf(++aig_.numVars);
  aig_.ands.push_back({lhs, a, b});
  strash_.emplace(key, lhs);
  return lhs;
}

Lit AigBuilder::lxor(Lit a, Lit b) {
  if (a > b)
    std::swap(a, b);
  if (a == kFalse)
    return b;
  if (a == kTrue)
    return litNot(b);
  if (a == b)
    return kFalse;
  if (a == litNot(b))
    return kTrue;
  return land(litNot(land(a, b)), litNot(land(litNot(a), litNot(b))));
}

Lit AigBuilder::mux(Lit sel, Lit then, Lit otherwise) {
  if (sel == kTrue || then == otherwise)
    return then;
  if (sel == kFalse)
    return otherwise;
  return lor(land(sel, then), land(litNot(sel), otherwise));
}

void AigBuilder::output(Lit l, const std::string &name) {
  aig_.outputs.push_back(l);
  aig_.outputNames.push_back(name);
}

Aig AigBuilder::finish() {
  aig_.validate();
  strash_.clear();
  return std::move(aig_);
}

// ---- bit-blasting ---------------------------------------------------------------

namespace {

using Bits = std::vector<Lit>;

class Blaster {
 public:
  explicit Blaster(const CoreModule &m) : m_(m), bits_(m.nodes.size()) {}

  BlastResult run() {
    if (!m_.isCombinational())
      fail(ErrorKind::HasState, m_.name + " has " + std::to_string(m_.registers.size()) +
                                    " registers; unroll it first");
    BlastResult r;
    for (const Port &p : m_.ports) {
      if (p.dir != PortDir::In)
        continue;
      Bits bits;
      for (unsigned i = 0; i < p.width; ++i)
        bits.push_back(b_.input(bitName(p.name, p.width, i)));
      bits_[p.node] = bits;
    }
    for (NodeId i = 0; i < m_.nodes.size(); ++i)
      if (m_.nodes[i].op != Op::Input)
        bits_[i] = blast(m_.nodes[i]);
    for (const Port &p : m_.ports) {
      r.ports.push_back({p.name, p.dir, bits_[p.node]});
      if (p.dir == PortDir::Out)
        for (unsigned i = 0; i < p.width; ++i)
          b_.output(bits_[p.node][i], bitName(p.name, p.width, i));
    }
    r.aig = b_.finish();
    return r;
  }

 private:
  Bits add(const Bits &a, const Bits &b, Lit carry) {
    Bits s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      Lit x = b_.lxor(a[i], b[i]);
      s[i] = b_.lxor(x, carry);
      if (i + 1 < a.size())
        carry = b_.lor(b_.land(a[i], b[i]), b_.land(carry, x));
    }
    return s;
  }

  static Bits inverted(Bits b) {
    for (Lit &l : b)
      l = litNot(l);
    return b;
  }

  /// a < b (unsigned) as the borrow out of a - b.
  Lit ult(const Bits &a, const Bits &b) {
    Lit borrow = kFalse;
    for (std::size_t i = 0; i < a.size(); ++i) {
      Lit same = b_.lxnor(a[i], b[i]);
      borrow = b_.lor(b_.land(litNot(a[i]), b[i]), b_.land(same, borrow));
    }
    return borrow;
  }

  Lit slt(Bits a, Bits b) {
    a.back() = litNot(a.back());
    b.back() = litNot(b.back());
    return ult(a, b);
  }

  Bits mul(const Bits &a, const Bits &b) {
    const std::size_t w = a.size();
    Bits acc(w, kFalse);
    for (std::size_t i = 0; i < w; ++i) {
      if (b[i] == kFalse)
        continue;
      Bits partial(w, kFalse);
      for (std::size_t j = i; j < w; ++j)
        partial[j] = b_.land(a[j - i], b[i]);
      acc = add(acc, partial, kFalse);
    }
    return acc;
  }

  /// Shift by a constant amount; `fill` enters from the vacated side.
  static Bits shiftConst(const Bits &a, uint64_t k, bool left, Lit fill) {
    const std::size_t w = a.size();
    Bits r(w, fill);
    for (std::size_t i = 0; i < w; ++i) {
      if (left && i >= k)
        r[i] = a[i - k];
      if (!left && k < w - i)
        r[i] = a[i + k];
    }
    return r;
  }

  Bits shift(const Bits &a, const Bits &amount, Op op) {
    const bool left = op == Op::Shl;
    const Lit fill = op == Op::Ashr ? a.back() : kFalse;
    const std::size_t w = a.size();
    Bits cur = a;
    Lit over = kFalse;
    for (std::size_t k = 0; k < amount.size(); ++k) {
      if (k >= 63 || (uint64_t{1} << k) >= w) {
        over = b_.lor(over, amount[k]);
        continue;
      }
      Bits shifted = shiftConst(cur, uint64_t{1} << k, left, fill);
      for (std::size_t i = 0; i < w; ++i)
        cur[i] = b_.mux(amount[k], shifted[i], cur[i]);
    }
    for (std::size_t i = 0; i < w; ++i)
      cur[i] = b_.mux(over, fill, cur[i]);
    return cur;
  }

  Bits blast(const Node &n) {
    auto arg = [&](std::size_t k) -> const Bits & { return bits_[n.args[k]]; };
    Bits r;
    switch (n.op) {
    case Op::Input:
    case Op::Reg:
      invalid("unexpected leaf");
    case Op::Const:
      for (unsigned i = 0; i < n.width; ++i)
        r.push_back(n.value.bit(i) ? kTrue : kFalse);
      return r;
    case Op::And:
    case Op::Or:
    case Op::Xor:
      for (std::size_t i = 0; i < n.width; ++i)
        r.push_back(n.op == Op::And  ? b_.land(arg(0)[i], arg(1)[i])
                    : n.op == Op::Or ? b_.lor(arg(0)[i], arg(1)[i])
                                     : b_.lxor(arg(0)[i], arg(1)[i]));
      return r;
    case Op::Not: return inverted(arg(0));
    case Op::Add: return add(arg(0), arg(1), kFalse);
    case Op::Sub: return add(arg(0), inverted(arg(1)), kTrue);
    case Op::Mul: return mul(arg(0), arg(1));
    case Op::Shl:
    case Op::Lshr:
    case Op::Ashr: return shift(arg(0), arg(1), n.op);
    case Op::Eq: {
      Lit acc = kTrue;
      for (std::size_t i = 0; i < arg(0).size(); ++i)
        acc = b_.land(acc, b_.lxnor(arg(0)[i], arg(1)[i]));
      return {acc};
    }
    case Op::Ult: return {ult(arg(0), arg(1))};
    case Op::Ule: return {litNot(ult(arg(1), arg(0)))};
    case Op::Slt: return {slt(arg(0), arg(1))};
    case Op::Sle: return {litNot(slt(arg(1), arg(0)))};
    case Op::Mux:
      for (std::size_t i = 0; i < n.width; ++i)
        r.push_back(b_.mux(arg(0)[0], arg(1)[i], arg(2)[i]));
      return r;
    case Op::Concat:
      r = arg(1);
      r.insert(r.end(), arg(0).begin(), arg(0).end());
      return r;
    case Op::Extract:
      return Bits(arg(0).begin() + n.aux, arg(0).begin() + n.aux + n.width);
    case Op::Zext:
    case Op::Sext: {
      r = arg(0);
      Lit fill = n.op == Op::Sext ? r.back() : kFalse;
      r.resize(n.width, fill);
      return r;
    }
    }
    invalid("bad op");
  }

  const CoreModule &m_;
  AigBuilder b_;
  std::vector<Bits> bits_;
};

} // namespace

BlastResult bitBlast(const CoreModule &m) { return Blaster(m).run(); }

} // namespace equivfuse::core
