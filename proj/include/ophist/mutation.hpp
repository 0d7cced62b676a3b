#ifndef OPHIST_MUTATION_HPP
#define OPHIST_MUTATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ophist/asmcore.hpp"

namespace ophist {

enum class Technique {
  garbage,
  garbage_nop,
  regswap,
  substitute,
  permute,
  transpose_modules,
};

std::string_view technique_name(Technique t);
std::optional<Technique> technique_from_name(std::string_view name);

// --------------------------------------------------------------------------
// Substitution rulebook: equivalence groups of instruction-sequence
// templates. Any member of a group may rewrite to any other member, so
// every directed rule has its inverse in the book.
// --------------------------------------------------------------------------

// Operand template: either a literal operand or a register slot. Slots with
// the same name must bind the same register across the whole pattern.
struct TemplateOperand {
  std::optional<Operand> literal;  // set for literals
  std::string slot;                // set for register slots
  bool operator==(const TemplateOperand&) const = default;
};

TemplateOperand literal_op(Operand op);
TemplateOperand reg_slot(std::string name);

struct InstrTemplate {
  Mnemonic mnemonic;
  std::vector<TemplateOperand> operands;
  bool operator==(const InstrTemplate&) const = default;
};

using SeqTemplate = std::vector<InstrTemplate>;

struct EquivalenceGroup {
  std::vector<SeqTemplate> forms;
};

using Rulebook = std::vector<EquivalenceGroup>;

// mov R,0 / xor R,R / and R,0 / sub R,R; test R,R / or R,R;
// mov ebp,esp / (push esp; pop ebp).
const Rulebook& default_rulebook();

// Canonical text form of the rulebook, digestable for manifests.
std::string serialize_rulebook(const Rulebook& book);

// One directed rewrite between two members of a group.
struct SubstitutionRule {
  SeqTemplate pattern;
  SeqTemplate replacement;
};

std::vector<SubstitutionRule> directed_rules(const Rulebook& book);

// New body with `rule` applied at `pos`, or nullopt when the pattern does
// not match there (or a label lands inside the matched span).
std::optional<std::vector<Instruction>> apply_rule_at(
    const SubstitutionRule& rule, const std::vector<Instruction>& body,
    std::size_t pos);

// --------------------------------------------------------------------------
// Mutation configuration
// --------------------------------------------------------------------------

struct MutationConfig {
  std::uint64_t seed = 0;
  Technique technique = Technique::garbage;
  double density = 0.0;              // per-site application probability in [0,1]
  std::optional<Rulebook> rulebook;  // substitute only; nullopt = default book
};

// --------------------------------------------------------------------------
// The five techniques. All are pure: same config + same input => byte
// identical serialized output.
// --------------------------------------------------------------------------

// Dead-code insertion at inter-instruction sites. Technique garbage draws
// uniformly from the no-op forms (add R,0 / mov R,R / or R,0 / and R,-1)
// and undo pairs (push R; pop R / inc R; sub R,1) over registers
// eax,ebx,ecx,edx,esi,edi; garbage_nop inserts literal nop.
Program insert_garbage(const Program& program, const MutationConfig& cfg);

// Bijective renaming over the 32-bit parents, esp excluded. Unmentioned
// registers stay fixed. Sub-register occurrences follow their parent.
struct RegisterPermutation {
  std::map<std::string, std::string> mapping;  // parent -> parent
};

// Seeded permutation that shuffles {eax,ebx,ecx,edx} and {esi,edi} within
// their groups, so every 8/16-bit alias stays mappable.
RegisterPermutation random_register_permutation(std::uint64_t seed);

// Throws invalid_permutation when the mapping is not bijective, touches
// esp, or strands a sub-register occurrence (e.g. dh under edx -> esi).
Program swap_registers(const Program& program,
                       const RegisterPermutation& permutation);

// Equivalent-instruction replacement per the rulebook. Throws
// empty_rulebook when the effective rulebook has no groups.
Program substitute_instructions(const Program& program,
                                const MutationConfig& cfg);

// Adjacent-pair reordering gated by the dependency safety check;
// density * body-length attempts per subroutine.
Program permute_instructions(const Program& program,
                             const MutationConfig& cfg);

// True when body[i] and body[i+1] may swap: neither is a control transfer,
// no label adjoins the pair, and their dependency footprints are disjoint
// (registers, flags and memory).
bool can_swap_adjacent(const Subroutine& sub, std::size_t i);

// Seeded shuffle of subroutine order; bodies untouched.
Program transpose_modules(const Program& program, const MutationConfig& cfg);

// Dispatch on cfg.technique.
Program apply_mutation(const Program& program, const MutationConfig& cfg);

// --------------------------------------------------------------------------
// Variant family synthesis
// --------------------------------------------------------------------------

struct FamilyResult {
  std::vector<Program> variants;  // ids <base>_v001, <base>_v002, ...
  std::string manifest_json;      // lineage manifest
};

// n variants of base, each the composition of `techniques` with per-variant
// derived seeds (configured seed + 1-based variant number).
FamilyResult make_family(const Program& base, std::size_t n,
                         const std::vector<MutationConfig>& techniques);

}  // namespace ophist

#endif  // OPHIST_MUTATION_HPP
