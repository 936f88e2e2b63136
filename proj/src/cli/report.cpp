#include "report.h"

#include <algorithm>
#include <sstream>

namespace equivfuse::cli {
namespace {

std::string hexOf(const BitVec &v) { return "0x" + v.toHex(); }

/// Left-aligned columns separated by two spaces.
std::string table(const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> w;
  for (const auto &r : rows) {
    w.resize(std::max(w.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
      w[i] = std::max(w[i], r[i].size());
  }
  std::string s;
  for (const auto &r : rows) {
    std::string line = "  ";
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size())
        line += std::string(w[i] - r[i].size() + 2, ' ');
    }
    s += line + "\n";
  }
  return s;
}

} // namespace

std::string formatVerdict(const solve::Verdict &v) {
  std::ostringstream os;
  std::string engine = v.engine.empty() ? "" : " [" + v.engine + "]";
  if (v.kind == solve::Verdict::Kind::Unknown) {
    os << solve::verdictLabel(v) << engine;
    if (!v.detail.empty())
      os << ": " << v.detail;
    os << "\n";
    return os.str();
  }
  os << solve::verdictLabel(v) << engine << "\n";
  if (v.kind != solve::Verdict::Kind::NotEquivalent || !v.cex)
    return os.str();
  os << "counterexample:\n";
  std::vector<std::vector<std::string>> rows{{"port", "frame", "hex", "dec"}};
  for (std::size_t t = 0; t < v.cex->frames.size(); ++t)
    for (const auto &[port, value] : v.cex->frames[t])
      rows.push_back({port, std::to_string(t), hexOf(value), value.toDecimal()});
  os << table(rows);
  if (!v.cex->defaulted.empty()) {
    os << "  (not in the solver model, set to 0:";
    for (const auto &d : v.cex->defaulted)
      os << " " << d;
    os << ")\n";
  }
  if (v.report) {
    os << "outputs:\n";
    std::vector<std::vector<std::string>> outs{{"port", "frame", "spec", "impl", ""}};
    for (const auto &d : v.report->outputs) {
      std::string frame = d.specFrame == d.implFrame ? std::to_string(d.specFrame)
                                                     : std::to_string(d.specFrame) + "/" + std::to_string(d.implFrame);
      outs.push_back({d.port, frame, hexOf(d.spec) + " (" + d.spec.toDecimal() + ")",
                      hexOf(d.impl) + " (" + d.impl.toDecimal() + ")", d.differs ? "differs" : "same"});
    }
    os << table(outs);
  } else {
    os << "(no replay data: the problem file has no .symmap sidecar)\n";
  }
  return os.str();
}

} // namespace equivfuse::cli
