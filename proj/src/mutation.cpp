#include "ophist/mutation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "ophist/digest.hpp"
#include "ophist/rng.hpp"

namespace ophist {

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::garbage: return "garbage";
    case Technique::garbage_nop: return "garbage_nop";
    case Technique::regswap: return "regswap";
    case Technique::substitute: return "substitute";
    case Technique::permute: return "permute";
    case Technique::transpose_modules: return "transpose_modules";
  }
  return "unknown";
}

std::optional<Technique> technique_from_name(std::string_view name) {
  for (Technique t : {Technique::garbage, Technique::garbage_nop,
                      Technique::regswap, Technique::substitute,
                      Technique::permute, Technique::transpose_modules})
    if (technique_name(t) == name) return t;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Garbage insertion
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& garbage_register_pool() {
  // Never esp/ebp: stack and frame discipline stay trivially intact.
  static const std::vector<std::string> pool = {"eax", "ebx", "ecx",
                                                "edx", "esi", "edi"};
  return pool;
}

Instruction make_instr(std::string_view mnem, std::vector<Operand> ops) {
  return Instruction{Mnemonic(mnem), std::move(ops)};
}

std::vector<Instruction> draw_garbage(SeededRng& rng) {
  const std::string& reg =
      garbage_register_pool()[rng.uniform_index(garbage_register_pool().size())];
  switch (rng.uniform_index(6)) {
    case 0: return {make_instr("add", {RegOperand{reg}, ImmOperand{0}})};
    case 1: return {make_instr("mov", {RegOperand{reg}, RegOperand{reg}})};
    case 2: return {make_instr("or", {RegOperand{reg}, ImmOperand{0}})};
    case 3: return {make_instr("and", {RegOperand{reg}, ImmOperand{-1}})};
    case 4:
      return {make_instr("push", {RegOperand{reg}}),
              make_instr("pop", {RegOperand{reg}})};
    default:
      return {make_instr("inc", {RegOperand{reg}}),
              make_instr("sub", {RegOperand{reg}, ImmOperand{1}})};
  }
}

}  // namespace

Program insert_garbage(const Program& program, const MutationConfig& cfg) {
  SeededRng rng(cfg.seed);
  Program out;
  out.id = program.id;
  for (const Subroutine& sub : program.subroutines) {
    Subroutine mutated{sub.name, {}, {}};
    std::vector<std::size_t> inserted_before(sub.body.size() + 1, 0);
    for (std::size_t site = 0; site <= sub.body.size(); ++site) {
      if (rng.bernoulli(cfg.density)) {
        std::vector<Instruction> garbage =
            cfg.technique == Technique::garbage_nop
                ? std::vector<Instruction>{make_instr("nop", {})}
                : draw_garbage(rng);
        inserted_before[site] = garbage.size();
        for (auto& g : garbage) mutated.body.push_back(std::move(g));
      }
      if (site < sub.body.size()) mutated.body.push_back(sub.body[site]);
    }
    // Labels keep pointing at the site they named; garbage inserted at the
    // same site lands after the label and is a no-op on that path.
    std::vector<std::size_t> shift(sub.body.size() + 1, 0);
    for (std::size_t site = 1; site <= sub.body.size(); ++site)
      shift[site] = shift[site - 1] + inserted_before[site - 1];
    for (const LabelDef& label : sub.labels)
      mutated.labels.push_back({label.name, label.position + shift[label.position]});
    out.subroutines.push_back(std::move(mutated));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Register exchange
// ---------------------------------------------------------------------------

RegisterPermutation random_register_permutation(std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::string> abcd = {"eax", "ebx", "ecx", "edx"};
  std::vector<std::string> sidi = {"esi", "edi"};
  std::vector<std::string> abcd_to = abcd;
  std::vector<std::string> sidi_to = sidi;
  rng.shuffle(abcd_to);
  rng.shuffle(sidi_to);
  RegisterPermutation perm;
  for (std::size_t i = 0; i < abcd.size(); ++i)
    perm.mapping[abcd[i]] = abcd_to[i];
  for (std::size_t i = 0; i < sidi.size(); ++i)
    perm.mapping[sidi[i]] = sidi_to[i];
  return perm;
}

namespace {

void validate_permutation(const RegisterPermutation& perm) {
  std::set<std::string> targets;
  for (const auto& [from, to] : perm.mapping) {
    if (from == "esp" || to == "esp")
      throw Error(ErrorCode::invalid_permutation,
                  "register permutation must not touch esp");
    if (parent_register(from) != from || parent_register(to) != to)
      throw Error(ErrorCode::invalid_permutation,
                  "permutation entries must be 32-bit parent registers");
    if (!targets.insert(to).second)
      throw Error(ErrorCode::invalid_permutation,
                  "permutation maps two registers to '" + to + "'");
    if (!perm.mapping.count(to))
      throw Error(ErrorCode::invalid_permutation,
                  "permutation is not closed over its own targets");
  }
}

std::string rename_register(const std::string& name,
                            const RegisterPermutation& perm) {
  std::string parent = parent_register(name);
  auto it = perm.mapping.find(parent);
  if (it == perm.mapping.end()) return name;
  std::string renamed = register_part_name(it->second, register_part(name));
  if (renamed.empty())
    throw Error(ErrorCode::invalid_permutation,
                "'" + name + "' has no alias under " + parent + " -> " +
                    it->second);
  return renamed;
}

}  // namespace

Program swap_registers(const Program& program,
                       const RegisterPermutation& permutation) {
  validate_permutation(permutation);
  Program out = program;
  for (Subroutine& sub : out.subroutines) {
    for (Instruction& instr : sub.body) {
      for (Operand& op : instr.operands) {
        if (auto* reg = std::get_if<RegOperand>(&op)) {
          reg->name = rename_register(reg->name, permutation);
        } else if (auto* mem = std::get_if<MemOperand>(&op)) {
          mem->base = rename_register(mem->base, permutation);
          if (mem->index) mem->index = rename_register(*mem->index, permutation);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instruction replacement
// ---------------------------------------------------------------------------

TemplateOperand literal_op(Operand op) { return {std::move(op), {}}; }
TemplateOperand reg_slot(std::string name) { return {std::nullopt, std::move(name)}; }

namespace {

InstrTemplate tpl(std::string_view mnem, std::vector<TemplateOperand> ops) {
  return InstrTemplate{Mnemonic(mnem), std::move(ops)};
}

using Bindings = std::map<std::string, std::string>;

bool match_operand(const TemplateOperand& t, const Operand& op,
                   Bindings& bindings) {
  if (t.literal) return *t.literal == op;
  const auto* reg = std::get_if<RegOperand>(&op);
  if (!reg) return false;
  auto [it, inserted] = bindings.emplace(t.slot, reg->name);
  return inserted || it->second == reg->name;
}

std::optional<Bindings> match_sequence(const SeqTemplate& pattern,
                                       const std::vector<Instruction>& body,
                                       std::size_t pos) {
  if (pos + pattern.size() > body.size()) return std::nullopt;
  Bindings bindings;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    const InstrTemplate& t = pattern[k];
    const Instruction& instr = body[pos + k];
    if (instr.mnemonic != t.mnemonic ||
        instr.operands.size() != t.operands.size())
      return std::nullopt;
    for (std::size_t o = 0; o < t.operands.size(); ++o)
      if (!match_operand(t.operands[o], instr.operands[o], bindings))
        return std::nullopt;
  }
  return bindings;
}

std::vector<Instruction> instantiate(const SeqTemplate& replacement,
                                     const Bindings& bindings) {
  std::vector<Instruction> out;
  for (const InstrTemplate& t : replacement) {
    Instruction instr{t.mnemonic, {}};
    for (const TemplateOperand& o : t.operands) {
      if (o.literal)
        instr.operands.push_back(*o.literal);
      else
        instr.operands.push_back(RegOperand{bindings.at(o.slot)});
    }
    out.push_back(std::move(instr));
  }
  return out;
}

}  // namespace

const Rulebook& default_rulebook() {
  static const Rulebook book = [] {
    Rulebook b;
    // Four ways to zero a register.
    b.push_back({{
        {tpl("mov", {reg_slot("r"), literal_op(ImmOperand{0})})},
        {tpl("xor", {reg_slot("r"), reg_slot("r")})},
        {tpl("and", {reg_slot("r"), literal_op(ImmOperand{0})})},
        {tpl("sub", {reg_slot("r"), reg_slot("r")})},
    }});
    // Self-test idioms.
    b.push_back({{
        {tpl("test", {reg_slot("r"), reg_slot("r")})},
        {tpl("or", {reg_slot("r"), reg_slot("r")})},
    }});
    // Frame-pointer setup via the stack.
    b.push_back({{
        {tpl("mov", {literal_op(Operand{RegOperand{"ebp"}}),
                     literal_op(Operand{RegOperand{"esp"}})})},
        {tpl("push", {literal_op(Operand{RegOperand{"esp"}})}),
         tpl("pop", {literal_op(Operand{RegOperand{"ebp"}})})},
    }});
    return b;
  }();
  return book;
}

std::string serialize_rulebook(const Rulebook& book) {
  std::string out;
  for (const EquivalenceGroup& group : book) {
    out += "group\n";
    for (const SeqTemplate& form : group.forms) {
      out += "  form";
      for (const InstrTemplate& t : form) {
        out += " | " + t.mnemonic.str();
        for (std::size_t i = 0; i < t.operands.size(); ++i) {
          out += i == 0 ? " " : ", ";
          const TemplateOperand& o = t.operands[i];
          out += o.literal ? serialize_operand(*o.literal) : "$" + o.slot;
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<SubstitutionRule> directed_rules(const Rulebook& book) {
  std::vector<SubstitutionRule> rules;
  for (const EquivalenceGroup& group : book)
    for (std::size_t a = 0; a < group.forms.size(); ++a)
      for (std::size_t b = 0; b < group.forms.size(); ++b)
        if (a != b) rules.push_back({group.forms[a], group.forms[b]});
  return rules;
}

std::optional<std::vector<Instruction>> apply_rule_at(
    const SubstitutionRule& rule, const std::vector<Instruction>& body,
    std::size_t pos) {
  auto bindings = match_sequence(rule.pattern, body, pos);
  if (!bindings) return std::nullopt;
  std::vector<Instruction> out(body.begin(),
                               body.begin() + static_cast<long>(pos));
  for (Instruction& instr : instantiate(rule.replacement, *bindings))
    out.push_back(std::move(instr));
  out.insert(out.end(), body.begin() + static_cast<long>(pos + rule.pattern.size()),
             body.end());
  return out;
}

Program substitute_instructions(const Program& program,
                                const MutationConfig& cfg) {
  const Rulebook& book = cfg.rulebook ? *cfg.rulebook : default_rulebook();
  if (book.empty())
    throw Error(ErrorCode::empty_rulebook, "substitution rulebook is empty");

  SeededRng rng(cfg.seed);
  Program out;
  out.id = program.id;
  for (const Subroutine& sub : program.subroutines) {
    Subroutine mutated{sub.name, {}, sub.labels};
    std::vector<Instruction> body = sub.body;

    auto label_inside = [&](std::size_t pos, std::size_t len) {
      for (const LabelDef& label : mutated.labels)
        if (label.position > pos && label.position < pos + len) return true;
      return false;
    };

    std::size_t pos = 0;
    while (pos < body.size()) {
      // Collect every (group member -> other member) rewrite applicable here.
      struct Candidate {
        const SeqTemplate* replacement;
        Bindings bindings;
        std::size_t match_len;
      };
      std::vector<Candidate> candidates;
      for (const EquivalenceGroup& group : book) {
        for (std::size_t f = 0; f < group.forms.size(); ++f) {
          auto bindings = match_sequence(group.forms[f], body, pos);
          if (!bindings || label_inside(pos, group.forms[f].size())) continue;
          for (std::size_t g = 0; g < group.forms.size(); ++g)
            if (g != f)
              candidates.push_back(
                  {&group.forms[g], *bindings, group.forms[f].size()});
        }
      }
      if (candidates.empty() || !rng.bernoulli(cfg.density)) {
        ++pos;
        continue;
      }
      const Candidate& pick = candidates[rng.uniform_index(candidates.size())];
      std::vector<Instruction> replacement =
          instantiate(*pick.replacement, pick.bindings);
      const std::size_t new_len = replacement.size();

      body.erase(body.begin() + static_cast<long>(pos),
                 body.begin() + static_cast<long>(pos + pick.match_len));
      body.insert(body.begin() + static_cast<long>(pos),
                  replacement.begin(), replacement.end());
      if (new_len != pick.match_len) {
        const auto delta = static_cast<std::ptrdiff_t>(new_len) -
                           static_cast<std::ptrdiff_t>(pick.match_len);
        for (LabelDef& label : mutated.labels)
          if (label.position >= pos + pick.match_len)
            label.position = static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(label.position) + delta);
      }
      pos += new_len;  // never rescan freshly written output
    }
    mutated.body = std::move(body);
    out.subroutines.push_back(std::move(mutated));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instruction permutation
// ---------------------------------------------------------------------------

namespace {

bool footprints_independent(const DependencyFootprint& a,
                            const DependencyFootprint& b) {
  auto intersects = [](const std::set<std::string>& x,
                       const std::set<std::string>& y) {
    for (const auto& r : x)
      if (y.count(r)) return true;
    return false;
  };
  // writes(a) vs reads(b) + writes(b)
  if (intersects(a.regs_written, b.regs_read)) return false;
  if (intersects(a.regs_written, b.regs_written)) return false;
  if (a.writes_flags && (b.reads_flags || b.writes_flags)) return false;
  if (a.writes_memory && (b.reads_memory || b.writes_memory)) return false;
  // writes(b) vs reads(a)
  if (intersects(b.regs_written, a.regs_read)) return false;
  if (b.writes_flags && a.reads_flags) return false;
  if (b.writes_memory && a.reads_memory) return false;
  return true;
}

}  // namespace

bool can_swap_adjacent(const Subroutine& sub, std::size_t i) {
  if (i + 1 >= sub.body.size()) return false;
  const Instruction& a = sub.body[i];
  const Instruction& b = sub.body[i + 1];
  if (is_control_transfer(a.mnemonic) || is_control_transfer(b.mnemonic))
    return false;
  for (const LabelDef& label : sub.labels)
    if (label.position >= i && label.position <= i + 2) return false;
  return footprints_independent(dependency_footprint(a),
                                dependency_footprint(b));
}

Program permute_instructions(const Program& program,
                             const MutationConfig& cfg) {
  SeededRng rng(cfg.seed);
  Program out = program;
  for (Subroutine& sub : out.subroutines) {
    if (sub.body.size() < 2) continue;
    const auto attempts = static_cast<std::size_t>(
        std::lround(cfg.density * static_cast<double>(sub.body.size())));
    for (std::size_t k = 0; k < attempts; ++k) {
      std::size_t i = rng.uniform_index(sub.body.size() - 1);
      if (can_swap_adjacent(sub, i)) std::swap(sub.body[i], sub.body[i + 1]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Module transposition
// ---------------------------------------------------------------------------

Program transpose_modules(const Program& program, const MutationConfig& cfg) {
  SeededRng rng(cfg.seed);
  Program out = program;
  rng.shuffle(out.subroutines);
  return out;
}

Program apply_mutation(const Program& program, const MutationConfig& cfg) {
  switch (cfg.technique) {
    case Technique::garbage:
    case Technique::garbage_nop:
      return insert_garbage(program, cfg);
    case Technique::regswap:
      return swap_registers(program, random_register_permutation(cfg.seed));
    case Technique::substitute:
      return substitute_instructions(program, cfg);
    case Technique::permute:
      return permute_instructions(program, cfg);
    case Technique::transpose_modules:
      return transpose_modules(program, cfg);
  }
  throw std::logic_error("unhandled technique");
}

// ---------------------------------------------------------------------------
// Family synthesis
// ---------------------------------------------------------------------------

FamilyResult make_family(const Program& base, std::size_t n,
                         const std::vector<MutationConfig>& techniques) {
  FamilyResult result;
  nlohmann::json manifest;
  manifest["base"] = base.id;
  manifest["base_digest"] = content_digest(serialize_program(base));

  bool uses_substitute = false;
  for (const MutationConfig& cfg : techniques)
    if (cfg.technique == Technique::substitute) uses_substitute = true;
  if (uses_substitute)
    manifest["rulebook_digest"] =
        content_digest(serialize_rulebook(default_rulebook()));

  manifest["variants"] = nlohmann::json::array();
  for (std::size_t v = 1; v <= n; ++v) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_v%03zu", v);
    Program variant = base;
    nlohmann::json record;
    record["id"] = base.id + suffix;
    record["file"] = base.id + suffix + ".oasm";
    record["seed"] = techniques.empty() ? v : techniques.front().seed + v;
    record["techniques"] = nlohmann::json::array();
    for (const MutationConfig& cfg : techniques) {
      MutationConfig derived = cfg;
      derived.seed = cfg.seed + v;
      variant = apply_mutation(variant, derived);
      record["techniques"].push_back(
          {{"technique", std::string(technique_name(cfg.technique))},
           {"seed", derived.seed},
           {"density", cfg.density}});
    }
    variant.id = base.id + suffix;
    result.variants.push_back(std::move(variant));
    manifest["variants"].push_back(std::move(record));
  }
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

}  // namespace ophist
