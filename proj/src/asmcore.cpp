#include "ophist/asmcore.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ophist {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct RegisterEntry {
  std::string_view parent;
  RegPart part;
};

const std::unordered_map<std::string_view, RegisterEntry>& register_table() {
  static const std::unordered_map<std::string_view, RegisterEntry> table = {
      {"eax", {"eax", RegPart::dword}}, {"ax", {"eax", RegPart::word}},
      {"ah", {"eax", RegPart::high8}},  {"al", {"eax", RegPart::low8}},
      {"ebx", {"ebx", RegPart::dword}}, {"bx", {"ebx", RegPart::word}},
      {"bh", {"ebx", RegPart::high8}},  {"bl", {"ebx", RegPart::low8}},
      {"ecx", {"ecx", RegPart::dword}}, {"cx", {"ecx", RegPart::word}},
      {"ch", {"ecx", RegPart::high8}},  {"cl", {"ecx", RegPart::low8}},
      {"edx", {"edx", RegPart::dword}}, {"dx", {"edx", RegPart::word}},
      {"dh", {"edx", RegPart::high8}},  {"dl", {"edx", RegPart::low8}},
      {"esi", {"esi", RegPart::dword}}, {"si", {"esi", RegPart::word}},
      {"edi", {"edi", RegPart::dword}}, {"di", {"edi", RegPart::word}},
      {"ebp", {"ebp", RegPart::dword}}, {"bp", {"ebp", RegPart::word}},
      {"esp", {"esp", RegPart::dword}}, {"sp", {"esp", RegPart::word}},
  };
  return table;
}

}  // namespace

bool is_register(std::string_view name) {
  return register_table().count(name) != 0;
}

std::string parent_register(std::string_view name) {
  auto it = register_table().find(name);
  return it == register_table().end() ? std::string()
                                      : std::string(it->second.parent);
}

RegPart register_part(std::string_view name) {
  return register_table().at(name).part;
}

std::string register_part_name(std::string_view parent32, RegPart part) {
  if (part == RegPart::dword) return std::string(parent32);
  const bool has8 = parent32 == "eax" || parent32 == "ebx" ||
                    parent32 == "ecx" || parent32 == "edx";
  char letter = parent32[1];  // e[a]x, e[s]i, e[b]p ...
  switch (part) {
    case RegPart::word:
      return std::string(parent32.substr(1));
    case RegPart::high8:
      return has8 ? std::string{letter, 'h'} : std::string();
    case RegPart::low8:
      return has8 ? std::string{letter, 'l'} : std::string();
    default:
      return std::string(parent32);
  }
}

const std::vector<std::string>& parent_registers() {
  static const std::vector<std::string> parents = {
      "eax", "ebx", "ecx", "edx", "esi", "edi", "ebp", "esp"};
  return parents;
}

// ---------------------------------------------------------------------------
// Mnemonic
// ---------------------------------------------------------------------------

Mnemonic::Mnemonic(std::string_view token) : token_(to_lower(token)) {
  bool ok = !token_.empty() && token_[0] >= 'a' && token_[0] <= 'z';
  for (char c : token_) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
          c == '.'))
      ok = false;
  }
  if (!ok)
    throw Error(ErrorCode::syntax_error,
                "invalid mnemonic '" + std::string(token) + "'");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::syntax_error,
              "line " + std::to_string(line) + ": " + reason, line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  char c0 = s[0];
  if (!(std::isalpha(static_cast<unsigned char>(c0)) || c0 == '_' ||
        c0 == '.'))
    return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '.' || c == '@' || c == '$'))
      return false;
  }
  return true;
}

// decimal, 0x hex, or trailing-h hex (which must start with a digit)
std::optional<std::int64_t> parse_immediate(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  std::int64_t value = 0;
  if (tok.size() > 2 && (tok.substr(0, 2) == "0x" || tok.substr(0, 2) == "0X")) {
    auto body = tok.substr(2);
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(),
                                   value, 16);
    if (ec != std::errc() || p != body.data() + body.size())
      return std::nullopt;
    return value;
  }
  if (tok.size() > 1 && (tok.back() == 'h' || tok.back() == 'H') &&
      std::isdigit(static_cast<unsigned char>(tok[0]))) {
    auto body = tok.substr(0, tok.size() - 1);
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(),
                                   value, 16);
    if (ec != std::errc() || p != body.data() + body.size())
      return std::nullopt;
    return value;
  }
  std::string_view body = tok;
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(),
                                 value, 10);
  if (ec != std::errc() || p != body.data() + body.size()) return std::nullopt;
  return value;
}

// Accepts "reg", "imm", "reg*scale" pieces of a bracketed memory expression.
std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

Operand parse_memory_operand(std::string_view inner, std::size_t line) {
  MemOperand mem;
  // Displacement sign: the grammar allows [base-8]; rewrite "-" to "+-"
  // outside the first position so one split handles both.
  std::string expr;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '-' && i > 0) expr += "+-";
    else expr += inner[i];
  }
  std::vector<std::string> parts = split_on(expr, '+');
  if (parts.empty() || parts.size() > 3)
    fail(line, "unsupported memory operand form [" + std::string(inner) + "]");
  for (auto& p : parts) p = to_lower(p);

  if (!is_register(parts[0]))
    fail(line, "memory base must be a register: '" + parts[0] + "'");
  mem.base = parts[0];

  if (parts.size() == 2) {
    // [base+disp]
    auto disp = parse_immediate(parts[1]);
    if (!disp) fail(line, "bad displacement '" + parts[1] + "'");
    mem.disp = *disp;
  } else if (parts.size() == 3) {
    // [base+index*scale+disp]
    auto star = parts[1].find('*');
    if (star == std::string::npos)
      fail(line, "expected index*scale in '" + parts[1] + "'");
    std::string index = std::string(trim(std::string_view(parts[1]).substr(0, star)));
    std::string scale_tok =
        std::string(trim(std::string_view(parts[1]).substr(star + 1)));
    if (!is_register(index))
      fail(line, "memory index must be a register: '" + index + "'");
    auto scale = parse_immediate(scale_tok);
    if (!scale || (*scale != 1 && *scale != 2 && *scale != 4 && *scale != 8))
      fail(line, "scale must be 1, 2, 4 or 8");
    auto disp = parse_immediate(parts[2]);
    if (!disp) fail(line, "bad displacement '" + parts[2] + "'");
    mem.index = index;
    mem.scale = static_cast<int>(*scale);
    mem.disp = *disp;
  }
  return mem;
}

Operand parse_operand(std::string_view raw, std::size_t line) {
  std::string_view tok = trim(raw);
  if (tok.empty()) fail(line, "empty operand");

  // Optional size prefix before a memory operand; accepted and dropped.
  for (std::string_view prefix : {"byte", "word", "dword"}) {
    if (tok.size() > prefix.size() &&
        to_lower(tok.substr(0, prefix.size())) == prefix &&
        std::isspace(static_cast<unsigned char>(tok[prefix.size()]))) {
      std::string_view rest = trim(tok.substr(prefix.size()));
      if (rest.size() > 3 && to_lower(rest.substr(0, 3)) == "ptr" &&
          std::isspace(static_cast<unsigned char>(rest[3]))) {
        tok = trim(rest.substr(3));
        if (tok.empty() || tok.front() != '[')
          fail(line, "size prefix must precede a memory operand");
      }
      break;
    }
  }

  if (tok.front() == '[') {
    if (tok.back() != ']') fail(line, "unterminated memory operand");
    return parse_memory_operand(trim(tok.substr(1, tok.size() - 2)), line);
  }

  std::string lowered = to_lower(tok);
  if (is_register(lowered)) return RegOperand{lowered};

  if (std::isdigit(static_cast<unsigned char>(lowered[0])) ||
      lowered[0] == '-') {
    auto imm = parse_immediate(lowered);
    if (!imm) fail(line, "bad immediate '" + std::string(tok) + "'");
    return ImmOperand{*imm};
  }

  if (is_identifier(lowered)) return LabelOperand{lowered};
  fail(line, "unrecognized operand '" + std::string(tok) + "'");
}

Mnemonic parse_mnemonic(std::string_view token, std::size_t line) {
  try {
    return Mnemonic(token);
  } catch (const Error& e) {
    fail(line, e.what());
  }
}

Instruction parse_instruction(std::string_view stmt, std::size_t line) {
  std::size_t sp = stmt.find_first_of(" \t");
  std::string_view mnem_tok = sp == std::string_view::npos ? stmt : stmt.substr(0, sp);
  Instruction instr{parse_mnemonic(mnem_tok, line), {}};

  if (sp != std::string_view::npos) {
    std::string_view rest = trim(stmt.substr(sp));
    if (!rest.empty()) {
      std::vector<std::string> raw_ops = split_on(rest, ',');
      if (raw_ops.size() > 3) fail(line, "more than 3 operands");
      for (const auto& r : raw_ops)
        instr.operands.push_back(parse_operand(r, line));
    }
  }
  return instr;
}

}  // namespace

Program parse_program(std::string_view text, std::string_view id) {
  Program program;
  program.id = std::string(id);

  std::optional<Subroutine> current;
  std::unordered_set<std::string> seen_names;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto semi = line.find(';'); semi != std::string_view::npos)
      line = line.substr(0, semi);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t first_sp = line.find_first_of(" \t");
    std::string head = to_lower(line.substr(0, first_sp));

    // proc <name>
    if (head == "proc") {
      if (current) fail(line_no, "nested proc");
      if (first_sp == std::string_view::npos)
        fail(line_no, "proc without a name");
      std::string name = to_lower(trim(line.substr(first_sp)));
      if (!is_identifier(name)) fail(line_no, "bad subroutine name '" + name + "'");
      if (is_register(name)) fail(line_no, "register name used as subroutine name");
      if (!seen_names.insert(name).second)
        throw Error(ErrorCode::duplicate_subroutine,
                    "line " + std::to_string(line_no) +
                        ": duplicate subroutine '" + name + "'",
                    line_no);
      current = Subroutine{name, {}, {}};
      continue;
    }

    if (head == "endp") {
      if (first_sp != std::string_view::npos && !trim(line.substr(first_sp)).empty())
        fail(line_no, "endp takes no operands");
      if (!current) fail(line_no, "endp outside proc");
      program.subroutines.push_back(std::move(*current));
      current.reset();
      continue;
    }

    // <name>:
    if (line.back() == ':') {
      std::string name = to_lower(trim(line.substr(0, line.size() - 1)));
      if (!is_identifier(name)) fail(line_no, "bad label name '" + name + "'");
      if (is_register(name)) fail(line_no, "register name used as label");
      if (!current) fail(line_no, "label outside proc");
      current->labels.push_back({name, current->body.size()});
      continue;
    }

    Instruction instr = parse_instruction(line, line_no);
    if (!current)
      throw Error(ErrorCode::orphan_instruction,
                  "line " + std::to_string(line_no) +
                      ": instruction outside proc/endp block",
                  line_no);
    current->body.push_back(std::move(instr));
  }

  if (current)
    fail(line_no, "unterminated proc '" + current->name + "'");
  if (program.subroutines.empty())
    fail(line_no, "listing contains no subroutines");
  return program;
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

std::string serialize_operand(const Operand& op) {
  std::ostringstream out;
  if (const auto* reg = std::get_if<RegOperand>(&op)) {
    out << reg->name;
  } else if (const auto* imm = std::get_if<ImmOperand>(&op)) {
    out << imm->value;
  } else if (const auto* mem = std::get_if<MemOperand>(&op)) {
    out << '[' << mem->base;
    if (mem->index) out << '+' << *mem->index << '*' << mem->scale;
    if (mem->disp) {
      if (*mem->disp < 0)
        out << '-' << -(*mem->disp);
      else
        out << '+' << *mem->disp;
    }
    out << ']';
  } else {
    out << std::get<LabelOperand>(op).name;
  }
  return out.str();
}

std::string serialize_instruction(const Instruction& instr) {
  std::string out = instr.mnemonic.str();
  for (std::size_t i = 0; i < instr.operands.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += serialize_operand(instr.operands[i]);
  }
  return out;
}

std::string serialize_program(const Program& program) {
  std::string out;
  for (std::size_t s = 0; s < program.subroutines.size(); ++s) {
    const Subroutine& sub = program.subroutines[s];
    if (s > 0) out += '\n';
    out += "proc " + sub.name + "\n";
    for (std::size_t i = 0; i <= sub.body.size(); ++i) {
      for (const LabelDef& label : sub.labels)
        if (label.position == i) out += label.name + ":\n";
      if (i < sub.body.size())
        out += "  " + serialize_instruction(sub.body[i]) + "\n";
    }
    out += "endp\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instruction semantics
// ---------------------------------------------------------------------------

namespace {

enum class Access { none, read, write, readwrite, address };

struct Semantics {
  std::array<Access, 3> ops{Access::none, Access::none, Access::none};
  std::vector<std::string_view> implicit_reads;
  std::vector<std::string_view> implicit_writes;
  bool reads_flags = false;
  bool writes_flags = false;
  bool reads_memory = false;   // implicit (stack etc.)
  bool writes_memory = false;  // implicit
};

using A = Access;

struct SemFlags {
  bool reads_flags = false;
  bool writes_flags = false;
  bool reads_memory = false;
  bool writes_memory = false;
};

Semantics sem(std::array<Access, 3> ops,
              std::vector<std::string_view> implicit_reads = {},
              std::vector<std::string_view> implicit_writes = {},
              SemFlags flags = {}) {
  Semantics s;
  s.ops = ops;
  s.implicit_reads = std::move(implicit_reads);
  s.implicit_writes = std::move(implicit_writes);
  s.reads_flags = flags.reads_flags;
  s.writes_flags = flags.writes_flags;
  s.reads_memory = flags.reads_memory;
  s.writes_memory = flags.writes_memory;
  return s;
}

constexpr SemFlags kWritesFlags{false, true, false, false};
constexpr SemFlags kRwFlags{true, true, false, false};
constexpr SemFlags kReadsFlags{true, false, false, false};

// Semantics for the mnemonic at the given operand count, or nullopt for
// mnemonics outside the table (handled conservatively by the caller).
std::optional<Semantics> lookup_semantics(const std::string& m,
                                          std::size_t argc) {
  if (m == "mov" || m == "movzx" || m == "movsx")
    return sem({A::write, A::read, A::none});
  if (m == "lea") return sem({A::write, A::address, A::none});
  if (m == "add" || m == "sub" || m == "and" || m == "or" || m == "xor")
    return sem({A::readwrite, A::read, A::none}, {}, {}, kWritesFlags);
  if (m == "adc" || m == "sbb")
    return sem({A::readwrite, A::read, A::none}, {}, {}, kRwFlags);
  if (m == "cmp" || m == "test")
    return sem({A::read, A::read, A::none}, {}, {}, kWritesFlags);
  if (m == "inc" || m == "dec" || m == "neg")
    return sem({A::readwrite, A::none, A::none}, {}, {}, kWritesFlags);
  if (m == "not") return sem({A::readwrite, A::none, A::none});
  if (m == "shl" || m == "sal" || m == "shr" || m == "sar" || m == "rol" ||
      m == "ror")
    return sem({A::readwrite, A::read, A::none}, {}, {}, kWritesFlags);
  if (m == "rcl" || m == "rcr")
    return sem({A::readwrite, A::read, A::none}, {}, {}, kRwFlags);
  if (m == "xchg") return sem({A::readwrite, A::readwrite, A::none});
  if (m == "push")
    return sem({A::read, A::none, A::none}, {"esp"}, {"esp"},
               {false, false, false, true});
  if (m == "pop")
    return sem({A::write, A::none, A::none}, {"esp"}, {"esp"},
               {false, false, true, false});
  if (m == "pushf" || m == "pushfd")
    return sem({A::none, A::none, A::none}, {"esp"}, {"esp"},
               {true, false, false, true});
  if (m == "popf" || m == "popfd")
    return sem({A::none, A::none, A::none}, {"esp"}, {"esp"},
               {false, true, true, false});
  if (m == "nop") return sem({A::none, A::none, A::none});
  if (m == "mul")
    return sem({A::read, A::none, A::none}, {"eax"}, {"eax", "edx"},
               kWritesFlags);
  if (m == "imul") {
    if (argc <= 1)
      return sem({A::read, A::none, A::none}, {"eax"}, {"eax", "edx"},
                 kWritesFlags);
    if (argc == 2)
      return sem({A::readwrite, A::read, A::none}, {}, {}, kWritesFlags);
    return sem({A::write, A::read, A::read}, {}, {}, kWritesFlags);
  }
  if (m == "div" || m == "idiv")
    return sem({A::read, A::none, A::none}, {"eax", "edx"}, {"eax", "edx"},
               kWritesFlags);
  if (m == "cdq" || m == "cwd")
    return sem({A::none, A::none, A::none}, {"eax"}, {"edx"});
  if (m == "stc" || m == "clc" || m == "cld" || m == "std")
    return sem({A::none, A::none, A::none}, {}, {}, kWritesFlags);
  if (m == "cmc") return sem({A::none, A::none, A::none}, {}, {}, kRwFlags);
  if (m == "lahf")
    return sem({A::none, A::none, A::none}, {}, {"eax"}, kReadsFlags);
  if (m == "sahf")
    return sem({A::none, A::none, A::none}, {"eax"}, {}, kWritesFlags);
  if (m.size() > 3 && m.compare(0, 3, "set") == 0)
    return sem({A::write, A::none, A::none}, {}, {}, kReadsFlags);
  if (m.size() > 4 && m.compare(0, 4, "cmov") == 0)
    return sem({A::readwrite, A::read, A::none}, {}, {}, kReadsFlags);
  if (m == "ret" || m == "retn")
    return sem({A::none, A::none, A::none}, {"esp"}, {"esp"},
               {false, false, true, false});
  if (m == "call") {
    // Callee may clobber anything; keep every parent in the write set.
    Semantics s = sem({A::read, A::none, A::none}, {"esp"}, {},
                      {false, true, true, true});
    for (const auto& p : parent_registers()) s.implicit_writes.push_back(p);
    return s;
  }
  if (m == "jmp") return sem({A::read, A::none, A::none});
  if (m[0] == 'j')  // conditional jump family
    return sem({A::read, A::none, A::none}, {}, {}, kReadsFlags);
  if (m == "loop")
    return sem({A::read, A::none, A::none}, {"ecx"}, {"ecx"});
  if (m == "loope" || m == "loopne")
    return sem({A::read, A::none, A::none}, {"ecx"}, {"ecx"}, kReadsFlags);
  return std::nullopt;
}

void add_mentioned_registers(const Operand& op, std::set<std::string>& out) {
  if (const auto* reg = std::get_if<RegOperand>(&op)) {
    out.insert(parent_register(reg->name));
  } else if (const auto* mem = std::get_if<MemOperand>(&op)) {
    out.insert(parent_register(mem->base));
    if (mem->index) out.insert(parent_register(*mem->index));
  }
}

}  // namespace

bool is_control_transfer(const Mnemonic& mnemonic) {
  const std::string& m = mnemonic.str();
  if (m[0] == 'j') return true;  // jmp and the jcc family
  static const std::unordered_set<std::string_view> kTransfers = {
      "call", "ret",  "retn",    "retf", "loop",    "loope",
      "loopne", "int", "into",   "iret", "syscall", "sysenter", "hlt"};
  return kTransfers.count(m) != 0;
}

DependencyFootprint dependency_footprint(const Instruction& instr) {
  DependencyFootprint fp;
  auto sem = lookup_semantics(instr.mnemonic.str(), instr.operands.size());

  if (!sem) {
    // Unknown mnemonic: every mentioned register both ways, plus flags and
    // memory, so the permutation safety check can never approve a swap.
    for (const Operand& op : instr.operands) {
      add_mentioned_registers(op, fp.regs_read);
      add_mentioned_registers(op, fp.regs_written);
    }
    fp.reads_flags = fp.writes_flags = true;
    fp.reads_memory = fp.writes_memory = true;
    return fp;
  }

  fp.reads_flags = sem->reads_flags;
  fp.writes_flags = sem->writes_flags;
  fp.reads_memory = sem->reads_memory;
  fp.writes_memory = sem->writes_memory;
  for (auto r : sem->implicit_reads) fp.regs_read.insert(std::string(r));
  for (auto w : sem->implicit_writes) fp.regs_written.insert(std::string(w));

  for (std::size_t i = 0; i < instr.operands.size() && i < 3; ++i) {
    const Operand& op = instr.operands[i];
    Access access = sem->ops[i];
    if (access == Access::none) continue;

    if (const auto* reg = std::get_if<RegOperand>(&op)) {
      std::string parent = parent_register(reg->name);
      if (access == Access::read || access == Access::readwrite)
        fp.regs_read.insert(parent);
      if (access == Access::write || access == Access::readwrite)
        fp.regs_written.insert(parent);
    } else if (const auto* mem = std::get_if<MemOperand>(&op)) {
      // Address computation reads base/index regardless of access direction.
      fp.regs_read.insert(parent_register(mem->base));
      if (mem->index) fp.regs_read.insert(parent_register(*mem->index));
      if (access != Access::address) {
        if (access == Access::read || access == Access::readwrite)
          fp.reads_memory = true;
        if (access == Access::write || access == Access::readwrite)
          fp.writes_memory = true;
      }
    }
    // Immediates and label references contribute nothing.
  }
  return fp;
}

std::set<std::string> registers_read(const Instruction& instr) {
  return dependency_footprint(instr).regs_read;
}

std::set<std::string> registers_written(const Instruction& instr) {
  return dependency_footprint(instr).regs_written;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax_error: return "syntax_error";
    case ErrorCode::duplicate_subroutine: return "duplicate_subroutine";
    case ErrorCode::orphan_instruction: return "orphan_instruction";
    case ErrorCode::empty_subroutine: return "empty_subroutine";
    case ErrorCode::zero_mass: return "zero_mass";
    case ErrorCode::no_features: return "no_features";
    case ErrorCode::kind_mismatch: return "kind_mismatch";
    case ErrorCode::empty_set: return "empty_set";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::invalid_permutation: return "invalid_permutation";
    case ErrorCode::empty_rulebook: return "empty_rulebook";
    case ErrorCode::invalid_metric: return "invalid_metric";
    case ErrorCode::invalid_matrix: return "invalid_matrix";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace ophist
