#include "equivfuse/core/text.h"

#include "equivfuse/support/error.h"

#include <sstream>

namespace equivfuse::core {

namespace {

std::string constText(const BitVec &v) { return std::to_string(v.width()) + "'h" + v.toHex(); }

[[noreturn]] void syntax(unsigned line, const std::string &msg) {
  fail(ErrorKind::SyntaxError, "core:" + std::to_string(line) + ": " + msg);
}

} // namespace

std::string dumpCore(const CoreModule &m) {
  std::ostringstream os;
  os << "module " << m.name << "\n";
  for (const auto &p : m.ports)
    os << "  port " << (p.dir == PortDir::In ? "in " : "out ") << p.name << " " << p.width << "\n";
  for (NodeId i = 0; i < m.nodes.size(); ++i) {
    const Node &n = m.nodes[i];
    os << "  %" << i << " = ";
    switch (n.op) {
    case Op::Const: os << "const " << constText(n.value) << "\n"; continue;
    case Op::Input: os << "input " << m.ports[n.aux].name; break;
    case Op::Reg:
      os << "reg " << m.registers[n.aux].name << " init " << constText(m.registers[n.aux].init);
      break;
    default:
      os << opName(n.op);
      for (std::size_t k = 0; k < n.args.size(); ++k)
        os << (k ? ", %" : " %") << n.args[k];
      if (n.op == Op::Extract)
        os << " [" << n.aux + n.width - 1 << ":" << n.aux << "]";
    }
    os << " : " << n.width << "\n";
  }
  for (const auto &r : m.registers)
    os << "  next " << r.name << " = %" << r.next << "\n";
  for (const auto &p : m.ports)
    if (p.dir == PortDir::Out)
      os << "  output " << p.name << " = %" << p.node << "\n";
  os << "end\n";
  return os.str();
}

CoreModule parseCore(std::string_view text) {
  CoreModule m;
  std::istringstream in{std::string(text)};
  std::string raw;
  unsigned line = 0;
  bool ended = false;
  auto nodeRef = [&](const std::string &tok) -> NodeId {
    if (tok.size() < 2 || tok[0] != '%')
      syntax(line, "expected a node reference, got '" + tok + "'");
    try {
      return static_cast<NodeId>(std::stoul(tok.substr(1)));
    } catch (const std::exception &) {
      syntax(line, "bad node reference '" + tok + "'");
    }
  };
  auto parseConst = [&](const std::string &tok) {
    auto q = tok.find("'h");
    if (q == std::string::npos)
      syntax(line, "expected W'hHEX, got '" + tok + "'");
    unsigned w = static_cast<unsigned>(std::stoul(tok.substr(0, q)));
    return BitVec::fromHex(tok.substr(q + 2), w);
  };
  auto findReg = [&](const std::string &name) -> Register & {
    for (auto &r : m.registers)
      if (r.name == name)
        return r;
    syntax(line, "unknown register " + name);
  };
  while (std::getline(in, raw)) {
    ++line;
    for (char &c : raw)
      if (c == ',')
        c = ' ';
    std::istringstream ls(raw);
    std::vector<std::string> t;
    for (std::string w; ls >> w;)
      t.push_back(w);
    if (t.empty() || t[0][0] == '#')
      continue;
    if (ended)
      syntax(line, "text after end");
    if (t[0] == "module" && t.size() == 2) {
      m.name = t[1];
    } else if (t[0] == "port" && t.size() == 4) {
      if (t[1] != "in" && t[1] != "out")
        syntax(line, "port direction must be in or out");
      m.ports.push_back({t[2], static_cast<unsigned>(std::stoul(t[3])),
                         t[1] == "in" ? PortDir::In : PortDir::Out, 0});
    } else if (t[0] == "next" && t.size() == 4 && t[2] == "=") {
      findReg(t[1]).next = nodeRef(t[3]);
    } else if (t[0] == "output" && t.size() == 4 && t[2] == "=") {
      auto p = m.findPort(t[1]);
      if (!p || m.ports[*p].dir != PortDir::Out)
        syntax(line, "unknown output port " + t[1]);
      m.ports[*p].node = nodeRef(t[3]);
    } else if (t[0] == "end") {
      ended = true;
    } else if (t.size() >= 3 && t[1] == "=") {
      NodeId id = nodeRef(t[0]);
      if (id != m.nodes.size())
        syntax(line, "nodes must be numbered consecutively");
      Node n;
      auto op = opFromName(t[2]);
      if (!op)
        syntax(line, "unknown op '" + t[2] + "'");
      n.op = *op;
      std::size_t k = 3;
      if (n.op == Op::Const) {
        if (t.size() != 4)
          syntax(line, "const takes one literal");
        n.value = parseConst(t[3]);
        n.width = n.value.width();
        m.nodes.push_back(std::move(n));
        continue;
      }
      if (t.size() < 5 || t[t.size() - 2] != ":")
        syntax(line, "expected ': width' at end of node");
      n.width = static_cast<unsigned>(std::stoul(t.back()));
      const std::size_t end = t.size() - 2;
      if (n.op == Op::Input) {
        auto p = m.findPort(t[3]);
        if (!p || m.ports[*p].dir != PortDir::In)
          syntax(line, "unknown input port " + t[3]);
        n.aux = *p;
        m.ports[*p].node = id;
      } else if (n.op == Op::Reg) {
        if (end != 6 || t[4] != "init")
          syntax(line, "expected: reg NAME init W'hHEX : W");
        n.aux = static_cast<unsigned>(m.registers.size());
        m.registers.push_back({t[3], n.width, parseConst(t[5]), id, id});
      } else {
        for (; k < end && t[k][0] == '%'; ++k)
          n.args.push_back(nodeRef(t[k]));
        if (n.op == Op::Extract) {
          if (k + 1 != end || t[k].front() != '[')
            syntax(line, "expected extract range [hi:lo]");
          auto colon = t[k].find(':');
          n.aux = static_cast<unsigned>(std::stoul(t[k].substr(colon + 1)));
        } else if (k != end) {
          syntax(line, "unexpected token '" + t[k] + "'");
        }
      }
      m.nodes.push_back(std::move(n));
    } else {
      syntax(line, "unrecognized line");
    }
  }
  if (!ended)
    syntax(line, "missing end");
  m.validate();
  return m;
}

} // namespace equivfuse::core
