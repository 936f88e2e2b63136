#pragma once

#include "equivfuse/core/aig.h"
#include "equivfuse/miter/miter.h"
#include "equivfuse/support/bitvec.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::backends {

enum class Format { Smtlib, Btor2, Aiger, AigerBinary, Dimacs };

std::string_view formatName(Format f);
/// Accepts the names above (smtlib, btor2, aiger, aig, dimacs) and file
/// extensions (smt2, btor, aag, cnf).
std::optional<Format> parseFormat(std::string_view text);
std::string_view formatExtension(Format f);
/// Guesses the format of a problem file from its extension.
std::optional<Format> formatFromPath(std::string_view path);

/// One shared miter input port as seen by the solver. `id` is the SMT
/// symbol, the BTOR2 input line id, the AIGER literal of bit 0 or the CNF
/// variable of bit 0; AIGER literals step by 2 and CNF variables by 1 per
/// bit.
struct Symbol {
  std::string id;
  std::string name;  // miter port name (`p` or `p@t`)
  std::string port;
  unsigned frame = 0;
  unsigned width = 1;
};

/// Contents of the `.symmap` sidecar: the solver-level symbol table plus
/// what replay needs (both designs in Core text form and the comparison
/// plan).
struct SymbolMap {
  Format format = Format::Smtlib;
  std::vector<Symbol> inputs;
  std::optional<miter::MiterModule> replay;

  std::string toJson() const;
  /// Throws ParseFailure on malformed input.
  static SymbolMap fromJson(std::string_view text);
};

struct EmittedProblem {
  Format format = Format::Smtlib;
  std::string text;  // bytes for binary AIGER
  SymbolMap symbols;
};

EmittedProblem emitSmtlib(const miter::MiterModule &m);
EmittedProblem emitBtor2(const miter::MiterModule &m);
/// Uses the miter's bit-level AIG (aiger mode), or bit-blasts the word-level
/// miter otherwise.
EmittedProblem emitAiger(const miter::MiterModule &m, bool binary = false);
EmittedProblem emitDimacs(const miter::MiterModule &m);
/// Emits the miter in `f`.
EmittedProblem emit(const miter::MiterModule &m, Format f);

/// Raw writers. Both throw MultiOutput unless `a` has exactly one output.
std::string writeAiger(const core::Aig &a, bool binary = false);
std::string writeDimacs(const core::Aig &a, const std::vector<std::string> &comments = {});

/// Reads an ASCII or binary AIGER file (no latches); throws ParseFailure.
core::Aig readAiger(std::string_view bytes);

/// Reads the SMT-LIB (QF_BV) or BTOR2 subset written by the emitters back
/// into a combinational module: one input port per declared constant or
/// `input` line, in file order, and a 1-bit output `neq` that is the
/// conjunction of the assertions (SMT-LIB) or the disjunction of the `bad`
/// properties (BTOR2). Throws ParseFailure outside the subset.
core::CoreModule readSmtlibProblem(std::string_view text);
core::CoreModule readBtor2Problem(std::string_view text);

/// Symbol map for a problem file read without its sidecar: one symbol per
/// input port of `problem` (SMT-LIB and BTOR2) or per AIG input (AIGER).
SymbolMap rawSymbols(Format f, const core::CoreModule &problem);
SymbolMap rawSymbols(const core::Aig &problem, bool binary);

/// A CNF formula in DIMACS form.
struct Cnf {
  int numVars = 0;
  std::vector<std::vector<int>> clauses;
};
/// Throws ParseFailure on malformed input.
Cnf readDimacs(std::string_view text);
/// Symbol map for a raw DIMACS file: the `c input NAME vars A..B` comments
/// written by the emitter when present, else one symbol per variable.
SymbolMap rawSymbols(const Cnf &cnf, std::string_view text);
/// Tseitin encoding of a single-output AIG; variable v of the AIG is CNF
/// variable v.
Cnf tseitin(const core::Aig &a);

/// Input values per frame, keyed by base port name.
struct Counterexample {
  std::vector<std::map<std::string, BitVec>> frames;
  /// `port@frame` entries whose bits were missing from the model and were
  /// set to zero.
  std::vector<std::string> defaulted;
};

enum class ModelStatus { Sat, Unsat, Unknown };

struct ModelResult {
  ModelStatus status = ModelStatus::Unknown;
  std::optional<Counterexample> cex;  // Sat only
  /// Unknown: "parse-failure: <excerpt>" or "solver-error: <excerpt>".
  std::string reason;
};

/// Normalizes solver stdout for `f` (SMT `sat` + `(get-model)`, BTOR2
/// witness, DIMACS `s`/`v` lines, AIGER witness). Never throws; malformed
/// output gives Unknown with a parse-failure reason.
ModelResult parseModel(Format f, std::string_view stdoutText, const SymbolMap &symbols);

/// Builds a counterexample from per-bit values of the miter inputs, in
/// symbol order (LSB first within each symbol). Frames span every frame
/// named by a symbol.
Counterexample counterexampleFromBits(const SymbolMap &symbols, const std::vector<bool> &bits);

/// SMT-LIB simple symbol for a miter port name: `@` becomes `_f`, `[` and
/// `]` become `_`, other characters outside the simple-symbol set become `_`.
std::string smtSymbol(std::string_view name);

} // namespace equivfuse::backends
