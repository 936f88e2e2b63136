#pragma once

#include "equivfuse/core/module.h"
#include "equivfuse/support/bitvec.h"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::netlist {

enum class PinDir { In, Out };

/// Boolean function over a cell's input pins.
struct CellFunction {
  enum class Kind { Pin, Const, Not, And, Or, Xor };
  Kind kind = Kind::Const;
  std::string pin;  // Pin
  bool value = false;  // Const
  std::vector<CellFunction> args;

  /// Accepts Liberty (`(A*B)'`, `A+B`) and Verilog (`~(A&B)`, `A|B`, `!A`)
  /// operator spellings; `^` is xor.
  static CellFunction parse(std::string_view text);
};

struct CellDef {
  std::string name;
  std::vector<std::string> inputs;
  std::string output;
  /// Combinational cells only.
  std::optional<CellFunction> function;
  /// Registers: `output` is Q; S/R are empty when absent.
  bool isRegister = false;
  std::string clock, data, set, reset;
};

/// Cell semantics used during elaboration. `builtin()` holds BUF, NOT,
/// NAND, NOR, DFF and DFFSR; more cells can be loaded from JSON:
///
///   {"cells": [{"name": "AND2", "inputs": ["A", "B"], "output": "Y",
///               "function": "A&B"},
///              {"name": "DFFR", "inputs": ["C", "D", "R"], "output": "Q",
///               "register": {"clock": "C", "data": "D", "reset": "R"}}]}
class CellLibrary {
 public:
  static CellLibrary builtin();
  void add(CellDef cell);
  /// Adds every cell in a JSON document of the form above.
  void load(std::string_view json, std::string_view fileName = {});
  const CellDef *find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, CellDef, std::less<>> cells_;
};

/// Net expression: identifier, bit/part select, concatenation, replication
/// or constant.
struct NetExpr {
  enum class Kind { Ident, Bit, Part, Concat, Repeat, Const };
  Kind kind = Kind::Ident;
  std::string name;
  int msb = 0;  // Bit: the index; Part: the left index; Repeat: the count
  int lsb = 0;
  BitVec value;  // Const
  bool sized = true;  // Const: false for a bare decimal
  std::vector<NetExpr> parts;  // Concat (MSB first), Repeat (one element)
  unsigned line = 0;
};

struct NetDecl {
  std::string name;
  int msb = 0;
  int lsb = 0;
  unsigned width() const { return static_cast<unsigned>((msb > lsb ? msb - lsb : lsb - msb) + 1); }
};

struct PortDecl {
  NetDecl net;
  PinDir dir = PinDir::In;
};

struct Instance {
  std::string cell;
  std::string name;
  std::vector<std::pair<std::string, std::optional<NetExpr>>> connections;
  unsigned line = 0;
};

struct Assign {
  NetExpr lhs;
  NetExpr rhs;
  unsigned line = 0;
};

struct NetlistModule {
  std::string name;
  std::string file;
  std::vector<PortDecl> ports;  // header order
  std::vector<NetDecl> wires;
  std::vector<Instance> instances;
  std::vector<Assign> assigns;
  unsigned line = 0;
};

struct VerilogSource {
  std::string name;
  std::string text;
};

/// Parses the structural Verilog subset. Modules named like a library cell
/// are skipped (their behavioral bodies are not parsed) with a warning.
std::vector<NetlistModule> parseStructuralVerilog(const std::vector<VerilogSource> &sources,
                                                  const CellLibrary &lib,
                                                  std::vector<std::string> *warnings = nullptr);

/// Flattens `top` into a Core module: library cells become bit operations,
/// DFF/DFFSR become 1-bit registers (init 0; DFFSR gives S priority over R
/// at frame granularity), assigns become wiring. Nets that drive nothing
/// are pruned with a warning.
core::CoreModule elaborate(const std::vector<NetlistModule> &modules, const std::string &top,
                           const CellLibrary &lib, std::vector<std::string> *warnings = nullptr);

} // namespace equivfuse::netlist
