#pragma once

// Minimal AIGER reader and evaluator used as a test oracle. It shares no
// code with the library's writer or reader.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace equivfuse::testkit {

struct RefAig {
  unsigned maxVar = 0, numInputs = 0, numOutputs = 0;
  std::vector<unsigned> inputs, outputs;
  struct And { unsigned lhs, a, b; };
  std::vector<And> ands;
  std::vector<std::string> inputNames;

  std::vector<bool> eval(const std::vector<bool> &in) const {
    std::vector<bool> v(maxVar + 1, false);
    auto get = [&](unsigned lit) { return v[lit / 2] != bool(lit & 1); };
    for (unsigned i = 0; i < numInputs; ++i)
      v[inputs[i] / 2] = in.at(i);
    for (const auto &g : ands)
      v[g.lhs / 2] = get(g.a) && get(g.b);
    std::vector<bool> out;
    for (unsigned o : outputs)
      out.push_back(get(o));
    return out;
  }
};

inline RefAig readRefAig(const std::string &bytes) {
  RefAig r;
  std::size_t nl = bytes.find('\n');
  std::istringstream hdr(bytes.substr(0, nl));
  std::string magic;
  unsigned latches = 0, numAnds = 0;
  hdr >> magic >> r.maxVar >> r.numInputs >> latches >> r.numOutputs >> numAnds;
  if ((magic != "aag" && magic != "aig") || latches != 0)
    throw std::runtime_error("unsupported AIGER header");
  std::size_t pos = nl + 1;
  auto nextLine = [&] {
    std::size_t e = bytes.find('\n', pos);
    std::string l = bytes.substr(pos, e - pos);
    pos = e + 1;
    return l;
  };
  bool binary = magic == "aig";
  for (unsigned i = 0; i < r.numInputs; ++i)
    r.inputs.push_back(binary ? 2 * (i + 1) : static_cast<unsigned>(std::stoul(nextLine())));
  for (unsigned i = 0; i < r.numOutputs; ++i)
    r.outputs.push_back(static_cast<unsigned>(std::stoul(nextLine())));
  for (unsigned i = 0; i < numAnds; ++i) {
    if (binary) {
      auto decode = [&] {
        unsigned x = 0, shift = 0;
        unsigned char c;
        do {
          c = static_cast<unsigned char>(bytes.at(pos++));
          x |= (c & 0x7fu) << shift;
          shift += 7;
        } while (c & 0x80);
        return x;
      };
      unsigned lhs = 2 * (r.numInputs + i + 1);
      unsigned a = lhs - decode();
      unsigned b = a - decode();
      r.ands.push_back({lhs, a, b});
    } else {
      std::istringstream l(nextLine());
      RefAig::And g{};
      l >> g.lhs >> g.a >> g.b;
      r.ands.push_back(g);
    }
  }
  r.inputNames.assign(r.numInputs, "");
  while (pos < bytes.size()) {
    std::string l = nextLine();
    if (l.empty() || l[0] == 'c')
      break;
    if (l[0] == 'i') {
      auto sp = l.find(' ');
      r.inputNames.at(std::stoul(l.substr(1, sp - 1))) = l.substr(sp + 1);
    }
  }
  return r;
}

} // namespace equivfuse::testkit
