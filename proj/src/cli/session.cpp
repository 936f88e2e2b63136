#include "equivfuse/cli/session.h"

#include "equivfuse/backends/backends.h"
#include "equivfuse/core/passes.h"
#include "equivfuse/core/text.h"
#include "equivfuse/graph/graph.h"
#include "equivfuse/hir/parser.h"
#include "equivfuse/hir/text.h"
#include "equivfuse/miter/miter.h"
#include "equivfuse/netlist/netlist.h"
#include "equivfuse/support/error.h"
#include "report.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace equivfuse::cli {
namespace fs = std::filesystem;
using backends::Format;

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> words;
  std::string cur;
  bool have = false;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote)
        quote = 0;
      else if (c == '\\' && quote == '"' && i + 1 < line.size())
        cur += line[++i];
      else
        cur += c;
    } else if (c == '$' && i + 1 < line.size() && line[i + 1] == '{') {
      std::size_t end = line.find('}', i + 2);
      if (end == std::string_view::npos)
        fail(ErrorKind::Usage, "unterminated ${ in command line");
      std::string name(line.substr(i + 2, end - i - 2));
      const char *value = std::getenv(name.c_str());
      if (!value)
        fail(ErrorKind::Usage, "environment variable " + name + " is not set");
      cur += value;
      have = true;
      i = end;
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == '\\' && i + 1 < line.size()) {
      cur += line[++i];
      have = true;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (have)
        words.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (quote)
    fail(ErrorKind::Usage, "unterminated quote");
  if (have)
    words.push_back(cur);
  return words;
}

namespace {

/// Flags of one command. `-x` and `--x` are the same flag.
class ArgParser {
 public:
  ArgParser(std::string command, std::set<std::string> switches, std::set<std::string> valued)
      : command_(std::move(command)), switches_(std::move(switches)), valued_(std::move(valued)) {}

  void parse(const std::vector<std::string> &args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string &a = args[i];
      if (a.size() < 2 || a[0] != '-') {
        positional.push_back(a);
        continue;
      }
      std::string name = a.substr(a.rfind("--", 0) == 0 ? 2 : 1);
      std::optional<std::string> inlineValue;
      if (auto eq = name.find('='); eq != std::string::npos) {
        inlineValue = name.substr(eq + 1);
        name = name.substr(0, eq);
      }
      if (switches_.count(name)) {
        if (inlineValue)
          fail(ErrorKind::Usage, command_ + ": -" + name + " takes no value");
        flags.insert(name);
      } else if (valued_.count(name)) {
        if (!inlineValue && i + 1 >= args.size())
          fail(ErrorKind::Usage, command_ + ": -" + name + " needs a value");
        values[name].push_back(inlineValue ? *inlineValue : args[++i]);
      } else {
        fail(ErrorKind::Usage, command_ + ": unknown option " + a);
      }
    }
  }

  bool has(const std::string &name) const { return flags.count(name) != 0; }
  std::optional<std::string> value(const std::string &name) const {
    auto it = values.find(name);
    if (it == values.end())
      return std::nullopt;
    if (it->second.size() > 1)
      fail(ErrorKind::Usage, command_ + ": -" + name + " given more than once");
    return it->second.front();
  }
  std::string required(const std::string &name) const {
    auto v = value(name);
    if (!v)
      fail(ErrorKind::Usage, command_ + ": missing -" + name);
    return *v;
  }
  std::vector<std::string> all(const std::string &name) const {
    auto it = values.find(name);
    return it == values.end() ? std::vector<std::string>{} : it->second;
  }

  std::set<std::string> flags;
  std::map<std::string, std::vector<std::string>> values;
  std::vector<std::string> positional;

 private:
  std::string command_;
  std::set<std::string> switches_;
  std::set<std::string> valued_;
};

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(ErrorKind::Io, "cannot write " + path);
  out << bytes;
  if (!out.flush())
    fail(ErrorKind::Io, "cannot write " + path);
}

unsigned parseUnsigned(const std::string &flag, const std::string &text) {
  try {
    std::size_t pos = 0;
    unsigned long v = std::stoul(text, &pos);
    if (pos == text.size() && text[0] != '-' && v <= 1000000)
      return static_cast<unsigned>(v);
  } catch (const std::exception &) {
  }
  fail(ErrorKind::Usage, "-" + flag + " expects a non-negative integer, got '" + text + "'");
}

double parseSeconds(const std::string &text) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos == text.size() && v > 0)
      return v;
  } catch (const std::exception &) {
  }
  fail(ErrorKind::Usage, "-timeout expects a positive number of seconds, got '" + text + "'");
}

/// Format of a problem file: extension first, then the leading bytes.
Format detectFormat(const std::string &path, std::string_view bytes) {
  if (auto f = backends::formatFromPath(path))
    return *f;
  std::size_t i = bytes.find_first_not_of(" \t\r\n");
  std::string_view head = i == std::string_view::npos ? std::string_view{} : bytes.substr(i);
  if (head.rfind("aag ", 0) == 0)
    return Format::Aiger;
  if (head.rfind("aig ", 0) == 0)
    return Format::AigerBinary;
  if (head.rfind("p cnf", 0) == 0 || head.rfind("c ", 0) == 0)
    return Format::Dimacs;
  if (!head.empty() && (head[0] == '(' || head[0] == ';'))
    return Format::Smtlib;
  if (!head.empty() && (std::isdigit(static_cast<unsigned char>(head[0])) != 0))
    return Format::Btor2;
  fail(ErrorKind::Usage, "cannot tell the format of " + path + "; use a .smt2, .btor2, .aag, .aig or .cnf name");
}

bool sameFamily(Format a, Format b) {
  auto aiger = [](Format f) { return f == Format::Aiger || f == Format::AigerBinary; };
  return a == b || (aiger(a) && aiger(b));
}

/// The problem as a word-level module with one `neq` output, inputs in
/// symbol order.
core::CoreModule problemModule(const solve::RawProblem &raw, const backends::SymbolMap &symbols) {
  if (raw.module)
    return *raw.module;
  if (!raw.aig)
    fail(ErrorKind::Usage, "a DIMACS problem can only be passed to a DIMACS engine");
  const core::Aig &a = *raw.aig;
  if (!a.latches.empty())
    fail(ErrorKind::UnsupportedConstruct, "AIGER problem with latches");
  unsigned bits = 0;
  for (const auto &s : symbols.inputs)
    bits += s.width;
  if (bits != a.inputs.size())
    fail(ErrorKind::ParseFailure, "symbol map covers " + std::to_string(bits) + " input bits, AIGER has " +
                                      std::to_string(a.inputs.size()));
  core::ModuleBuilder b("problem");
  std::vector<core::NodeId> var(a.numVars + 1, 0);
  std::vector<bool> known(a.numVars + 1, false);
  std::size_t k = 0;
  for (const auto &s : symbols.inputs) {
    core::NodeId in = b.input(s.name, s.width);
    for (unsigned i = 0; i < s.width; ++i, ++k) {
      uint32_t v = core::litVar(a.inputs[k]);
      var[v] = s.width == 1 ? in : b.extract(in, i, i);
      known[v] = true;
    }
  }
  auto lit = [&](core::Lit l) {
    uint32_t v = core::litVar(l);
    core::NodeId n = v == 0 ? b.constant(1, 0) : var[v];
    if (v != 0 && !known[v])
      fail(ErrorKind::ParseFailure, "AIGER literal " + std::to_string(l) + " used before definition");
    return core::litNegated(l) ? b.bitNot(n) : n;
  };
  for (const auto &g : a.ands) {
    core::NodeId n = b.bitAnd(lit(g.rhs0), lit(g.rhs1));
    var[core::litVar(g.lhs)] = n;
    known[core::litVar(g.lhs)] = true;
  }
  if (a.outputs.empty())
    fail(ErrorKind::ParseFailure, "AIGER problem has no output");
  core::NodeId neq = lit(a.outputs[0]);
  for (std::size_t i = 1; i < a.outputs.size(); ++i)
    neq = b.bitOr(neq, lit(a.outputs[i]));
  b.output("neq", neq);
  return b.finish();
}

/// Re-emits a problem for an engine that reads another format.
backends::EmittedProblem bridge(const solve::RawProblem &raw, const backends::SymbolMap &symbols, Format target) {
  miter::MiterModule mm;
  mm.module = problemModule(raw, symbols);
  auto inPorts = mm.module.inputPorts();
  if (inPorts.size() != symbols.inputs.size())
    fail(ErrorKind::ParseFailure, "symbol map lists " + std::to_string(symbols.inputs.size()) +
                                      " inputs, the problem declares " + std::to_string(inPorts.size()));
  for (std::size_t i = 0; i < inPorts.size(); ++i) {
    const auto &s = symbols.inputs[i];
    mm.inputs.push_back({mm.module.ports[inPorts[i]].name, s.port, s.frame, s.width});
  }
  if (symbols.replay) {
    mm.specName = symbols.replay->specName;
    mm.implName = symbols.replay->implName;
    mm.specFrames = symbols.replay->specFrames;
    mm.implFrames = symbols.replay->implFrames;
    mm.sequential = symbols.replay->sequential;
  } else {
    mm.specName = mm.implName = "raw";
  }
  mm.mode = target == Format::Btor2 ? miter::MiterMode::Btor2
                                    : target == Format::Smtlib ? miter::MiterMode::Smtlib : miter::MiterMode::Aiger;
  if (raw.aig && (target == Format::Dimacs || target == Format::Aiger || target == Format::AigerBinary))
    mm.aig = *raw.aig;
  backends::EmittedProblem out = backends::emit(mm, target);
  out.symbols.replay = symbols.replay;
  return out;
}

solve::Verdict runInternal(const std::string &engine, const solve::RawProblem &raw,
                           const backends::SymbolMap &symbols, unsigned bitLimit) {
  solve::InternalOptions opts;
  opts.bitLimit = bitLimit;
  if (engine == "internal-enum")
    opts.engine = solve::InternalOptions::Engine::Enum;
  else if (engine == "internal-dpll")
    opts.engine = solve::InternalOptions::Engine::Dpll;
  solve::Verdict v = solve::solveRawProblem(raw, symbols, opts);
  if (v.kind != solve::Verdict::Kind::NotEquivalent || !v.cex)
    return v;
  if (symbols.replay)
    return solve::checkWithReplay(std::move(v), *symbols.replay);
  if (!solve::satisfiesRaw(raw, symbols, *v.cex))
    return solve::Verdict::unknown(solve::UnknownReason::SolverError, "model does not satisfy the problem");
  return v;
}

bool isInternal(const std::string &engine) {
  return engine == "internal" || engine == "internal-sat" || engine == "internal-dpll" || engine == "internal-enum";
}

const char *kHelp =
    "commands:\n"
    "  set_port -input|-output NAME [-split] [-rename NEW]\n"
    "  read_c -spec|-impl -top NAME [--emit hir|core] FILE...\n"
    "  read_graph -spec|-impl -top NAME [--emit hir|core] FILE\n"
    "  read_v -spec|-impl -top NAME [-lib CELLS.json]... [--emit core] FILE...\n"
    "  equiv_miter -specModule NAME -implModule NAME -mitermode smtlib|btor2|aiger -o FILE\n"
    "              [-k N] [--spec-k N] [--impl-k N] [--compare-frames last|all|LIST]\n"
    "  solver_runner -solver NAME[,NAME...] -inputfile FILE [-timeout SECONDS]\n"
    "                [-registry FILE] [-bitlimit N]\n"
    "  help\n"
    "engines: internal (CDCL), internal-sat, internal-dpll, internal-enum, or a registered\n"
    "external engine (z3, bitwuzla, kissat, cadical, or -registry entries)\n";

} // namespace

Session::Session(std::ostream &out, std::ostream &err)
    : out_(out), err_(err), registry_(solve::EngineRegistry::builtin()) {}

void Session::warn(const std::string &msg) { err_ << "warning: " << msg << "\n"; }

int Session::execute(std::string_view line) {
  std::vector<std::string> words;
  try {
    std::string_view trimmed = line;
    std::size_t i = trimmed.find_first_not_of(" \t\r");
    if (i == std::string_view::npos || trimmed[i] == '#')
      return kExitEquivalent;
    words = tokenize(line);
  } catch (const Error &e) {
    err_ << "error: " << e.what() << "\n";
    return kExitError;
  }
  return execute(words);
}

int Session::execute(const std::vector<std::string> &words) {
  if (words.empty())
    return kExitEquivalent;
  std::string cmd = words[0];
  std::vector<std::string> args(words.begin() + 1, words.end());
  std::string line;
  for (const auto &w : words)
    line += (line.empty() ? "" : " ") + w;
  try {
    if (cmd == "set_port") {
      cmdSetPort(args);
    } else if (cmd == "read_c" || cmd == "read_graph" || cmd == "read_v") {
      cmdRead(cmd.substr(5), args);
    } else if (cmd == "read_fir" || cmd == "read_firrtl") {
      fail(ErrorKind::UnsupportedFrontend,
           cmd + " is not supported; synthesize the design to a gate-level netlist and use read_v");
    } else if (cmd == "equiv_miter") {
      cmdEquivMiter(args, line);
    } else if (cmd == "solver_runner") {
      return cmdSolverRunner(args);
    } else if (cmd == "help") {
      cmdHelp();
    } else {
      fail(ErrorKind::Usage, "unknown command '" + cmd + "' (try help)");
    }
  } catch (const Error &e) {
    err_ << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception &e) {
    err_ << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitEquivalent;
}

int Session::runScript(std::string_view text) {
  int result = kExitEquivalent;
  bool any = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string_view::npos || line[i] == '#')
      continue;
    any = true;
    bool solver = line.substr(i).rfind("solver_runner", 0) == 0;
    int rc = execute(line);
    if (rc == kExitError)
      return rc;
    if (solver)
      result = rc;
  }
  if (!any) {
    err_ << "error: " << errorKindName(ErrorKind::Usage) << ": script has no commands\n";
    return kExitError;
  }
  return result;
}

void Session::cmdHelp() { out_ << kHelp; }

void Session::cmdSetPort(const std::vector<std::string> &args) {
  ArgParser p("set_port", {"input", "output", "split"}, {"rename"});
  p.parse(args);
  if (p.positional.size() != 1)
    fail(ErrorKind::Usage, "set_port: expected one port name");
  if (p.has("input") && p.has("output"))
    fail(ErrorKind::ConflictingDirective, "port '" + p.positional[0] + "' given both -input and -output");
  hir::PortDirective d;
  d.name = p.positional[0];
  if (p.has("input"))
    d.dir = hir::ParamDir::In;
  if (p.has("output"))
    d.dir = hir::ParamDir::Out;
  d.split = p.has("split");
  d.rename = p.value("rename");
  if (!d.dir && !d.split && !d.rename)
    fail(ErrorKind::Usage, "set_port: give -input, -output, -split or -rename");
  for (auto &old : directives_) {
    if (old.name != d.name)
      continue;
    if (old.dir && d.dir && *old.dir != *d.dir)
      fail(ErrorKind::ConflictingDirective, "port '" + d.name + "' is already directed as " +
                                                (*old.dir == hir::ParamDir::In ? "input" : "output"));
    if (old.rename && d.rename && *old.rename != *d.rename)
      fail(ErrorKind::ConflictingDirective, "port '" + d.name + "' is already renamed to '" + *old.rename + "'");
    if (d.dir)
      old.dir = d.dir;
    old.split = old.split || d.split;
    if (d.rename)
      old.rename = d.rename;
    return;
  }
  directives_.push_back(d);
}

void Session::store(bool spec, Slot slot) {
  std::optional<Slot> &target = spec ? spec_ : impl_;
  if (target)
    warn(std::string(spec ? "spec" : "impl") + " slot held '" + target->module.name + "', replaced by '" +
         slot.module.name + "'");
  target = std::move(slot);
}

void Session::cmdRead(const std::string &kind, const std::vector<std::string> &args) {
  std::string cmd = "read_" + kind;
  ArgParser p(cmd, {"spec", "impl"}, {"top", "emit", "lib"});
  p.parse(args);
  if (p.has("spec") == p.has("impl"))
    fail(ErrorKind::Usage, cmd + ": give exactly one of -spec and -impl");
  std::string top = p.required("top");
  if (p.positional.empty())
    fail(ErrorKind::Usage, cmd + ": no input files");
  auto emitMode = p.value("emit");
  if (emitMode && *emitMode != "hir" && *emitMode != "core")
    fail(ErrorKind::Usage, cmd + ": --emit expects hir or core");
  if (kind != "v" && !p.all("lib").empty())
    fail(ErrorKind::Usage, cmd + ": -lib applies to read_v only");

  Slot slot;
  slot.kind = kind;
  slot.files = p.positional;
  std::vector<std::string> warnings;

  if (kind == "c" || kind == "graph") {
    hir::HirFunction fn;
    if (kind == "c") {
      hir::HirProgram all;
      for (const auto &file : p.positional) {
        hir::HirProgram prog = hir::parseMiniC(readFile(file), file);
        for (auto &f : prog.functions)
          all.functions.push_back(std::move(f));
      }
      const hir::HirFunction *found = all.find(top);
      if (!found)
        fail(ErrorKind::TopNotFound, "no function '" + top + "' in " + p.positional.front() +
                                         (p.positional.size() > 1 ? " and the other inputs" : ""));
      fn = *found;
    } else {
      if (p.positional.size() != 1)
        fail(ErrorKind::Usage, "read_graph: expected one JSON file");
      graph::GraphSpec g = graph::parseGraph(readFile(p.positional[0]), p.positional[0]);
      if (!g.name.empty() && g.name != top)
        fail(ErrorKind::TopNotFound, "graph in " + p.positional[0] + " is named '" + g.name + "', not '" + top + "'");
      fn = graph::lowerGraphToHir(g, top);
    }
    hir::applyDirectives(fn, directives_, &warnings);
    if (emitMode == std::optional<std::string>("hir"))
      out_ << hir::dumpHir(fn);
    hir::ValidatedFunction vf = hir::checkFunction(std::move(fn));
    for (const auto &w : vf.warnings())
      warnings.push_back(w);
    slot.module = core::lowerHir(vf);
  } else {
    if (emitMode == std::optional<std::string>("hir"))
      fail(ErrorKind::Usage, "read_v: a netlist has no HIR form; use --emit core");
    netlist::CellLibrary lib = netlist::CellLibrary::builtin();
    for (const auto &file : p.all("lib"))
      lib.load(readFile(file), file);
    std::vector<netlist::VerilogSource> sources;
    for (const auto &file : p.positional)
      sources.push_back({file, readFile(file)});
    auto modules = netlist::parseStructuralVerilog(sources, lib, &warnings);
    slot.module = netlist::elaborate(modules, top, lib, &warnings);
    for (const auto &d : directives_) {
      if (slot.module.findPort(d.name)) {
        if (d.rename)
          miter::renamePort(slot.module, d.name, *d.rename);
        if (d.dir || d.split)
          warnings.push_back("set_port " + d.name + ": netlist port directions and widths are fixed, only -rename applies");
      }
    }
  }
  for (const auto &w : warnings)
    warn(w);
  if (emitMode == std::optional<std::string>("core"))
    out_ << core::dumpCore(slot.module);
  store(p.has("spec"), std::move(slot));
}

void Session::cmdEquivMiter(const std::vector<std::string> &args, const std::string &line) {
  ArgParser p("equiv_miter", {}, {"specModule", "implModule", "mitermode", "o", "k", "spec-k", "impl-k", "compare-frames"});
  p.parse(args);
  if (!p.positional.empty())
    fail(ErrorKind::Usage, "equiv_miter: unexpected argument '" + p.positional[0] + "'");
  std::string specName = p.required("specModule");
  std::string implName = p.required("implModule");
  miter::MiterMode mode = miter::parseMode(p.required("mitermode"));
  std::string outPath = p.required("o");
  if (!spec_)
    fail(ErrorKind::Usage, "equiv_miter: the spec slot is empty; run read_* -spec first");
  if (!impl_)
    fail(ErrorKind::Usage, "equiv_miter: the impl slot is empty; run read_* -impl first");
  if (spec_->module.name != specName)
    fail(ErrorKind::Usage, "equiv_miter: spec slot holds '" + spec_->module.name + "', not '" + specName + "'");
  if (impl_->module.name != implName)
    fail(ErrorKind::Usage, "equiv_miter: impl slot holds '" + impl_->module.name + "', not '" + implName + "'");

  miter::MiterOptions opts;
  if (auto k = p.value("k"))
    opts.k = parseUnsigned("k", *k);
  if (auto k = p.value("spec-k"))
    opts.specK = parseUnsigned("spec-k", *k);
  if (auto k = p.value("impl-k"))
    opts.implK = parseUnsigned("impl-k", *k);
  for (auto k : {opts.k, opts.specK, opts.implK})
    if (k && *k == 0)
      fail(ErrorKind::Usage, "equiv_miter: unroll depths must be at least 1");
  if (auto c = p.value("compare-frames"))
    opts.compare = miter::CompareFrames::parse(*c);

  miter::PortMap pm = miter::matchPorts(spec_->module, impl_->module);
  miter::MiterModule mm = miter::buildMiter(spec_->module, impl_->module, pm, mode, opts);
  Format f = mode == miter::MiterMode::Smtlib  ? Format::Smtlib
             : mode == miter::MiterMode::Btor2 ? Format::Btor2
             : backends::formatFromPath(outPath) == Format::AigerBinary ? Format::AigerBinary
                                                                         : Format::Aiger;
  backends::EmittedProblem e = backends::emit(mm, f);
  writeFile(outPath, e.text);
  writeFile(outPath + ".symmap", e.symbols.toJson());
  artifacts_[outPath] = line;
  artifacts_[outPath + ".symmap"] = line;
  out_ << "wrote " << outPath << " (" << backends::formatName(f) << ", " << mm.inputBits() << " input bits";
  if (mm.sequential)
    out_ << ", " << mm.specFrames << "/" << mm.implFrames << " frames";
  out_ << ") and " << outPath << ".symmap\n";
}

int Session::cmdSolverRunner(const std::vector<std::string> &args) {
  ArgParser p("solver_runner", {}, {"solver", "inputfile", "timeout", "registry", "bitlimit"});
  p.parse(args);
  if (!p.positional.empty())
    fail(ErrorKind::Usage, "solver_runner: unexpected argument '" + p.positional[0] + "'");
  std::string solverList = p.required("solver");
  std::string path = p.required("inputfile");
  std::optional<double> timeout;
  if (auto t = p.value("timeout"))
    timeout = parseSeconds(*t);
  unsigned bitLimit = 24;
  if (auto b = p.value("bitlimit"))
    bitLimit = parseUnsigned("bitlimit", *b);
  for (const auto &file : p.all("registry"))
    registry_.load(readFile(file));

  std::vector<std::string> engines;
  std::stringstream ss(solverList);
  for (std::string e; std::getline(ss, e, ',');)
    if (!e.empty())
      engines.push_back(e);
  if (engines.empty())
    fail(ErrorKind::Usage, "solver_runner: -solver is empty");

  std::string bytes = readFile(path);
  Format format = detectFormat(path, bytes);
  solve::RawProblem raw = solve::readRawProblem(format, bytes);
  backends::SymbolMap symbols = raw.symbols;
  std::string sidecar = path + ".symmap";
  if (fs::exists(sidecar)) {
    backends::SymbolMap side = backends::SymbolMap::fromJson(readFile(sidecar));
    if (side.format == format)
      symbols = std::move(side);
    else
      warn(sidecar + " describes a " + std::string(backends::formatName(side.format)) + " file, ignored");
  }

  std::vector<fs::path> temporaries;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto &t : temporaries)
      fs::remove(t, ec);
  };
  solve::Verdict verdict;
  try {
    if (engines.size() == 1 && isInternal(engines[0])) {
      verdict = runInternal(engines[0], raw, symbols, bitLimit);
    } else {
      std::vector<std::pair<solve::ProblemFile, solve::SolverConfig>> entries;
      for (const auto &name : engines) {
        if (isInternal(name))
          fail(ErrorKind::Usage, "solver_runner: internal engines cannot join a portfolio");
        solve::SolverConfig cfg = registry_.resolve(name);
        if (timeout)
          cfg.timeoutSeconds = *timeout;
        solve::ProblemFile pf;
        if (sameFamily(cfg.format, format)) {
          pf.path = path;
          pf.symbols = symbols;
          pf.raw = raw;
        } else {
          backends::EmittedProblem e = bridge(raw, symbols, cfg.format);
          fs::path tmp = fs::temp_directory_path() /
                         ("equivfuse-" + std::to_string(::getpid()) + "-" + std::to_string(temporaries.size()) + "." +
                          std::string(backends::formatExtension(cfg.format)));
          writeFile(tmp.string(), e.text);
          temporaries.push_back(tmp);
          out_ << "bridged " << path << " to " << backends::formatName(cfg.format) << " for " << name << "\n";
          pf.path = tmp.string();
          pf.symbols = std::move(e.symbols);
          pf.raw = solve::readRawProblem(cfg.format, e.text);
        }
        entries.emplace_back(std::move(pf), std::move(cfg));
      }
      verdict = entries.size() == 1 ? solve::runExternal(entries[0].first, entries[0].second)
                                    : solve::portfolio(entries);
    }
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  out_ << formatVerdict(verdict);
  return solve::exitCode(verdict);
}

} // namespace equivfuse::cli
