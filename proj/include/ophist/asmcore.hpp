#ifndef OPHIST_ASMCORE_HPP
#define OPHIST_ASMCORE_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ophist/errors.hpp"

namespace ophist {

// ---------------------------------------------------------------------------
// Register table: 32-bit general-purpose set plus 16/8-bit aliases.
// Dependency analysis always collapses a sub-register to its 32-bit parent.
// ---------------------------------------------------------------------------

enum class RegPart { dword, word, high8, low8 };

bool is_register(std::string_view name);

// "dh" -> "edx", "ax" -> "eax", "esi" -> "esi". Empty for non-registers.
std::string parent_register(std::string_view name);

RegPart register_part(std::string_view name);

// Name of `part` of `parent32`, e.g. ("eax", high8) -> "ah".
// Empty when the parent has no such part (esi/edi/ebp/esp have no 8-bit part).
std::string register_part_name(std::string_view parent32, RegPart part);

// The eight 32-bit parents, in table order.
const std::vector<std::string>& parent_registers();

// ---------------------------------------------------------------------------
// Domain model
// ---------------------------------------------------------------------------

// Lowercase opcode name; the unit of histogram binning.
class Mnemonic {
 public:
  // Normalizes case and validates [a-z][a-z0-9_.]*. Throws syntax_error.
  explicit Mnemonic(std::string_view token);

  const std::string& str() const { return token_; }

  bool operator==(const Mnemonic&) const = default;
  auto operator<=>(const Mnemonic&) const = default;

 private:
  std::string token_;
};

struct RegOperand {
  std::string name;  // lowercase, as written (sub-register names preserved)
  bool operator==(const RegOperand&) const = default;
};

struct ImmOperand {
  std::int64_t value = 0;
  bool operator==(const ImmOperand&) const = default;
};

// Exactly the three addressing forms of the listing grammar:
// [base], [base+disp], [base+index*scale+disp].
struct MemOperand {
  std::string base;
  std::optional<std::string> index;
  int scale = 1;  // 1, 2, 4 or 8; meaningful only when index is set
  std::optional<std::int64_t> disp;
  bool operator==(const MemOperand&) const = default;
};

struct LabelOperand {
  std::string name;
  bool operator==(const LabelOperand&) const = default;
};

using Operand = std::variant<RegOperand, ImmOperand, MemOperand, LabelOperand>;

struct Instruction {
  Mnemonic mnemonic;
  std::vector<Operand> operands;  // 0-3 entries
  bool operator==(const Instruction&) const = default;
};

// A label names a position in the body: 0..body.size(), where position i
// means "immediately before instruction i" (body.size() = end of body).
struct LabelDef {
  std::string name;
  std::size_t position = 0;
  bool operator==(const LabelDef&) const = default;
};

struct Subroutine {
  std::string name;
  std::vector<Instruction> body;
  std::vector<LabelDef> labels;

  bool empty() const { return body.empty(); }
  bool operator==(const Subroutine&) const = default;
};

struct Program {
  std::string id;
  std::vector<Subroutine> subroutines;
  bool operator==(const Program&) const = default;
};

// ---------------------------------------------------------------------------
// Listing parser / serializer (.oasm format)
// ---------------------------------------------------------------------------

// Parses a textual assembly listing into a Program. Subroutines appear in
// source order; mnemonics and register names are lowercased; comments and
// blank lines are discarded; labels are recorded as positions.
Program parse_program(std::string_view text, std::string_view id);

// Canonical serialization: lowercase, two-space instruction indent, single
// space after the mnemonic, ", " between operands, decimal immediates.
// Byte-stable for a given Program; reparses to a structurally equal Program.
std::string serialize_program(const Program& program);

std::string serialize_instruction(const Instruction& instr);
std::string serialize_operand(const Operand& op);

// ---------------------------------------------------------------------------
// Register read/write sets (the dependency model behind permutation safety)
// ---------------------------------------------------------------------------

// Registers whose value the instruction observes, parent-collapsed,
// including memory-operand base/index registers. Mnemonics outside the
// semantics table fall back to every register mentioned by the instruction.
std::set<std::string> registers_read(const Instruction& instr);

// Registers the instruction may change, parent-collapsed; sub-register
// writes report the full parent. Same conservative fallback.
std::set<std::string> registers_written(const Instruction& instr);

// Full dependency footprint: registers plus flags and memory treated as
// single pseudo-locations. Unknown mnemonics touch everything.
struct DependencyFootprint {
  std::set<std::string> regs_read;
  std::set<std::string> regs_written;
  bool reads_flags = false;
  bool writes_flags = false;
  bool reads_memory = false;
  bool writes_memory = false;
};

DependencyFootprint dependency_footprint(const Instruction& instr);

// jmp/jcc/call/ret/loop and friends; these never move under permutation.
bool is_control_transfer(const Mnemonic& mnemonic);

}  // namespace ophist

#endif  // OPHIST_ASMCORE_HPP
