#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ophist/distance.hpp"
#include "ophist/mutation.hpp"
#include "generators.hpp"

using namespace ophist;

namespace {

// Register-renaming sample pair.
const char* kRenameV1 =
    "proc main\n"
    "  pop edx\n"
    "  mov edi, 4\n"
    "  mov esi, ebp\n"
    "  mov eax, 12\n"
    "  add edx, 136\n"
    "  mov ebx, [edx]\n"
    "  mov [esi+eax*4+4376], ebx\n"
    "endp\n";

// Version 2 of the same routine: consistent register renaming only.
const char* kRenameV2 =
    "proc main\n"
    "  pop eax\n"
    "  mov ebx, 4\n"
    "  mov edx, ebp\n"
    "  mov edi, 12\n"
    "  add eax, 136\n"
    "  mov esi, [eax]\n"
    "  mov [edx+edi*4+4376], esi\n"
    "endp\n";

// Instruction-replacement sample pair.
const char* kReplaceV1 =
    "proc main\n"
    "  push ebp\n"
    "  mov ebp, esp\n"
    "  mov esi, dword ptr [ebp+8]\n"
    "  test esi, esi\n"
    "  je 0x401045\n"
    "  mov edi, dword ptr [ebp+12]\n"
    "  or edi, edi\n"
    "  je 0x401045\n"
    "  xor edx, edx\n"
    "endp\n";

// Version 2: test<->or swapped, mov ebp,esp split, xor -> sub.
const char* kReplaceV2 =
    "proc main\n"
    "  push ebp\n"
    "  push esp\n"
    "  pop ebp\n"
    "  mov esi, dword ptr [ebp+8]\n"
    "  or esi, esi\n"
    "  je 0x401045\n"
    "  mov edi, dword ptr [ebp+12]\n"
    "  test edi, edi\n"
    "  je 0x401045\n"
    "  sub edx, edx\n"
    "endp\n";

bool histogram_multisets_equal(const HistogramSet& a, const HistogramSet& b) {
  auto bins_of = [](const HistogramSet& s) {
    std::vector<std::map<std::string, double>> all;
    for (const auto& h : s.histograms) all.push_back(h.bins);
    std::sort(all.begin(), all.end());
    return all;
  };
  return bins_of(a) == bins_of(b);
}

const SubstitutionRule& find_rule(const std::vector<SubstitutionRule>& rules,
                                  const SeqTemplate& pattern,
                                  const SeqTemplate& replacement) {
  for (const auto& rule : rules)
    if (rule.pattern == pattern && rule.replacement == replacement) return rule;
  FAIL("rule not shipped");
  return rules.front();
}

}  // namespace

TEST_CASE("insert_garbage: density 0 is the identity") {
  Program p = parse_program(kRenameV1, "base");
  MutationConfig cfg{7, Technique::garbage, 0.0, std::nullopt};
  CHECK(insert_garbage(p, cfg) == p);
  cfg.technique = Technique::garbage_nop;
  CHECK(insert_garbage(p, cfg) == p);
}

TEST_CASE("insert_garbage: garbage forms, growth and determinism") {
  Program p = parse_program(kRenameV1, "base");
  MutationConfig cfg{3, Technique::garbage, 1.0, std::nullopt};
  Program mutant = insert_garbage(p, cfg);
  CHECK(mutant.subroutines[0].body.size() > p.subroutines[0].body.size());

  // every inserted run is one of the six shipped forms
  const auto& body = mutant.subroutines[0].body;
  const auto& original = p.subroutines[0].body;
  std::size_t oi = 0;
  const std::set<std::string> pool = {"eax", "ebx", "ecx", "edx", "esi", "edi"};
  for (std::size_t i = 0; i < body.size();) {
    if (oi < original.size() && body[i] == original[oi]) {
      ++i;
      ++oi;
      continue;
    }
    const Instruction& g = body[i];
    const std::string mnem = g.mnemonic.str();
    REQUIRE((mnem == "add" || mnem == "mov" || mnem == "or" || mnem == "and" ||
             mnem == "push" || mnem == "inc"));
    if (mnem == "push" || mnem == "inc") {
      // undo pair on the same register
      REQUIRE(i + 1 < body.size());
      const Instruction& u = body[i + 1];
      const std::string reg = std::get<RegOperand>(g.operands[0]).name;
      CHECK(pool.count(reg) == 1);
      if (mnem == "push") {
        CHECK(u.mnemonic.str() == "pop");
        CHECK(std::get<RegOperand>(u.operands[0]).name == reg);
      } else {
        CHECK(u.mnemonic.str() == "sub");
        CHECK(std::get<RegOperand>(u.operands[0]).name == reg);
        CHECK(std::get<ImmOperand>(u.operands[1]).value == 1);
      }
      i += 2;
    } else {
      const std::string reg = std::get<RegOperand>(g.operands[0]).name;
      CHECK(pool.count(reg) == 1);
      if (mnem == "mov")
        CHECK(std::get<RegOperand>(g.operands[1]).name == reg);
      else if (mnem == "and")
        CHECK(std::get<ImmOperand>(g.operands[1]).value == -1);
      else
        CHECK(std::get<ImmOperand>(g.operands[1]).value == 0);
      i += 1;
    }
  }
  CHECK(oi == original.size());

  CHECK(insert_garbage(p, cfg) == mutant);  // same seed, same output
  MutationConfig other = cfg;
  other.seed = 4;
  CHECK(insert_garbage(p, other) != mutant);
}

TEST_CASE("insert_garbage: nop variant adds a nop bin and moves the distance") {
  Program p = parse_program(kRenameV1, "base");
  MutationConfig cfg{5, Technique::garbage_nop, 0.5, std::nullopt};
  Program mutant = insert_garbage(p, cfg);
  for (std::size_t i = 0; i < mutant.subroutines[0].body.size(); ++i) {
    const Instruction& instr = mutant.subroutines[0].body[i];
    if (instr.mnemonic.str() == "nop") CHECK(instr.operands.empty());
  }
  OpcodeHistogram h = build_histogram(mutant.subroutines[0]);
  CHECK(h.bins.count("nop") == 1);
  double d = symmetric_distance(extract_features(p), extract_features(mutant));
  CHECK(d > 0.0);
}

TEST_CASE("insert_garbage: labels keep naming their original site") {
  Program p = parse_program(
      "proc f\n  mov eax, 1\nlp:\n  add eax, 1\n  jne lp\nendp", "t");
  MutationConfig cfg{11, Technique::garbage_nop, 1.0, std::nullopt};
  Program mutant = insert_garbage(p, cfg);
  REQUIRE(mutant.subroutines[0].labels.size() == 1);
  const LabelDef& label = mutant.subroutines[0].labels[0];
  // the instruction the label named still follows it (garbage in between
  // is fine; real instructions are not)
  const auto& body = mutant.subroutines[0].body;
  bool found = false;
  for (std::size_t i = label.position; i < body.size() && !found; ++i) {
    if (body[i] == p.subroutines[0].body[1]) found = true;
    else CHECK(body[i].mnemonic.str() == "nop");
  }
  CHECK(found);
}

TEST_CASE("swap_registers: identity permutation") {
  Program p = parse_program(kRenameV1, "base");
  RegisterPermutation identity;
  for (const auto& parent : {"eax", "ebx", "ecx", "edx", "esi", "edi"})
    identity.mapping[parent] = parent;
  CHECK(swap_registers(p, identity) == p);
}

TEST_CASE("swap_registers: maps version 1 onto version 2") {
  Program v1 = parse_program(kRenameV1, "v1");
  Program v2 = parse_program(kRenameV2, "v2");
  RegisterPermutation perm;
  perm.mapping = {{"edx", "eax"},
                  {"edi", "ebx"},
                  {"esi", "edx"},
                  {"eax", "edi"},
                  {"ebx", "esi"}};
  Program swapped = swap_registers(v1, perm);
  REQUIRE(swapped.subroutines.size() == 1);
  // instruction-by-instruction against the printed listing
  REQUIRE(swapped.subroutines[0].body.size() == v2.subroutines[0].body.size());
  for (std::size_t i = 0; i < v2.subroutines[0].body.size(); ++i)
    CHECK(swapped.subroutines[0].body[i] == v2.subroutines[0].body[i]);
  CHECK(serialize_program(swapped) == serialize_program(v2));
}

TEST_CASE("swap_registers: sub-register occurrences follow the parent") {
  Program p = parse_program("proc f\n  mov dh, 0x40\n  mov dl, 1\nendp", "t");
  RegisterPermutation perm;
  perm.mapping = {{"edx", "eax"}, {"eax", "edx"}};
  Program swapped = swap_registers(p, perm);
  CHECK(std::get<RegOperand>(swapped.subroutines[0].body[0].operands[0]).name ==
        "ah");
  CHECK(std::get<RegOperand>(swapped.subroutines[0].body[1].operands[0]).name ==
        "al");
}

TEST_CASE("swap_registers: invalid permutations") {
  Program p = parse_program(kRenameV1, "base");
  auto code_of = [&](const RegisterPermutation& perm) {
    try {
      swap_registers(p, perm);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  RegisterPermutation not_bijective;
  not_bijective.mapping = {{"eax", "ebx"}, {"ecx", "ebx"}};
  CHECK(code_of(not_bijective) == ErrorCode::invalid_permutation);

  RegisterPermutation not_closed;
  not_closed.mapping = {{"eax", "ebx"}};
  CHECK(code_of(not_closed) == ErrorCode::invalid_permutation);

  RegisterPermutation touches_esp;
  touches_esp.mapping = {{"esp", "eax"}, {"eax", "esp"}};
  CHECK(code_of(touches_esp) == ErrorCode::invalid_permutation);

  // dh exists in the body, but esi has no high-8 part
  Program with_dh = parse_program("proc f\n  mov dh, 1\nendp", "t");
  RegisterPermutation strands;
  strands.mapping = {{"edx", "esi"}, {"esi", "edx"}};
  try {
    swap_registers(with_dh, strands);
    FAIL("expected invalid_permutation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_permutation);
  }
}

TEST_CASE("swap_registers: histograms are untouched (property)") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Program p = testgen::random_rich_program(rng, "t");
    Program swapped =
        swap_registers(p, random_register_permutation(rng()));
    HistogramSet before = extract_features(p);
    HistogramSet after = extract_features(swapped);
    REQUIRE(before.histograms.size() == after.histograms.size());
    for (std::size_t i = 0; i < before.histograms.size(); ++i)
      CHECK(before.histograms[i].bins == after.histograms[i].bins);
    CHECK(symmetric_distance(before, after) == 0.0);
  }
}

TEST_CASE("substitute: density 0 identity and empty rulebook error") {
  Program p = parse_program(kReplaceV1, "b");
  MutationConfig cfg{1, Technique::substitute, 0.0, std::nullopt};
  CHECK(substitute_instructions(p, cfg) == p);
  cfg.rulebook = Rulebook{};
  try {
    substitute_instructions(p, cfg);
    FAIL("expected empty_rulebook");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_rulebook);
  }
}

TEST_CASE("substitute: forced zero-idiom rewrite") {
  Program p = parse_program("proc f\n  mov eax, 0\nendp", "t");
  std::vector<SubstitutionRule> rules = directed_rules(default_rulebook());
  SeqTemplate mov0 = {{Mnemonic("mov"), {reg_slot("r"), literal_op(ImmOperand{0})}}};
  SeqTemplate xorr = {{Mnemonic("xor"), {reg_slot("r"), reg_slot("r")}}};
  const SubstitutionRule& rule = find_rule(rules, mov0, xorr);
  auto rewritten = apply_rule_at(rule, p.subroutines[0].body, 0);
  REQUIRE(rewritten.has_value());
  REQUIRE(rewritten->size() == 1);
  CHECK(serialize_instruction((*rewritten)[0]) == "xor eax, eax");
  // no match elsewhere
  CHECK(!apply_rule_at(rule, p.subroutines[0].body, 1).has_value());
}

TEST_CASE("substitute: version 1 maps onto version 2 via shipped rules") {
  Program v1 = parse_program(kReplaceV1, "v1");
  Program v2 = parse_program(kReplaceV2, "v2");
  std::vector<SubstitutionRule> rules = directed_rules(default_rulebook());

  SeqTemplate test_rr = {{Mnemonic("test"), {reg_slot("r"), reg_slot("r")}}};
  SeqTemplate or_rr = {{Mnemonic("or"), {reg_slot("r"), reg_slot("r")}}};
  SeqTemplate mov_ebp_esp = {{Mnemonic("mov"),
                              {literal_op(Operand{RegOperand{"ebp"}}),
                               literal_op(Operand{RegOperand{"esp"}})}}};
  SeqTemplate push_pop = {{Mnemonic("push"), {literal_op(Operand{RegOperand{"esp"}})}},
                          {Mnemonic("pop"), {literal_op(Operand{RegOperand{"ebp"}})}}};
  SeqTemplate xor_rr = {{Mnemonic("xor"), {reg_slot("r"), reg_slot("r")}}};
  SeqTemplate sub_rr = {{Mnemonic("sub"), {reg_slot("r"), reg_slot("r")}}};

  std::vector<Instruction> body = v1.subroutines[0].body;
  auto rewrite = [&](const SeqTemplate& pat, const SeqTemplate& rep,
                     std::size_t pos) {
    auto next = apply_rule_at(find_rule(rules, pat, rep), body, pos);
    REQUIRE(next.has_value());
    body = *next;
  };
  rewrite(mov_ebp_esp, push_pop, 1);  // mov ebp, esp -> push esp; pop ebp
  rewrite(test_rr, or_rr, 4);         // test esi, esi (shifted by the split)
  rewrite(or_rr, test_rr, 7);         // or edi, edi
  rewrite(xor_rr, sub_rr, 9);         // xor edx, edx

  REQUIRE(body.size() == v2.subroutines[0].body.size());
  for (std::size_t i = 0; i < body.size(); ++i)
    CHECK(body[i] == v2.subroutines[0].body[i]);
}

TEST_CASE("substitute: every shipped rule round-trips") {
  std::vector<SubstitutionRule> rules = directed_rules(default_rulebook());
  CHECK(rules.size() == 12 + 2 + 2);  // 4-clique + 2-clique + 2-clique
  for (const SubstitutionRule& rule : rules) {
    // instantiate the pattern with a concrete register to get a test body
    std::map<std::string, std::string> bind;
    std::vector<Instruction> body;
    for (const InstrTemplate& t : rule.pattern) {
      Instruction instr{t.mnemonic, {}};
      for (const TemplateOperand& o : t.operands)
        instr.operands.push_back(o.literal ? *o.literal
                                           : Operand{RegOperand{"ecx"}});
      body.push_back(instr);
    }
    auto forward = apply_rule_at(rule, body, 0);
    REQUIRE(forward.has_value());
    SubstitutionRule inverse{rule.replacement, rule.pattern};
    auto back = apply_rule_at(inverse, *forward, 0);
    REQUIRE(back.has_value());
    CHECK(*back == body);
  }
}

TEST_CASE("substitute: seeded engine rewrites zero idioms somewhere") {
  Program p = parse_program(
      "proc f\n  mov eax, 0\n  push ecx\n  xor ebx, ebx\n  test esi, esi\nendp",
      "t");
  MutationConfig cfg{2, Technique::substitute, 1.0, std::nullopt};
  Program mutated = substitute_instructions(p, cfg);
  CHECK(mutated != p);
  CHECK(substitute_instructions(p, cfg) == mutated);  // deterministic
  // density 1 must rewrite every matching site; none of the original
  // zero-idiom instructions may survive verbatim
  for (const Instruction& instr : mutated.subroutines[0].body)
    CHECK(serialize_instruction(instr) != "mov eax, 0");
}

TEST_CASE("permute: printed reordering example is reachable") {
  Program p = parse_program(
      "proc f\n  mov eax, 0x0F\n  push ecx\n  add esi, ebx\nendp", "t");
  Subroutine sub = p.subroutines[0];
  // add esi, ebx commutes past push ecx, then past mov eax, 0F
  REQUIRE(can_swap_adjacent(sub, 1));
  std::swap(sub.body[1], sub.body[2]);
  REQUIRE(can_swap_adjacent(sub, 0));
  std::swap(sub.body[0], sub.body[1]);
  CHECK(serialize_instruction(sub.body[0]) == "add esi, ebx");
  CHECK(serialize_instruction(sub.body[1]) == "mov eax, 15");
  CHECK(serialize_instruction(sub.body[2]) == "push ecx");
}

TEST_CASE("permute: dependency, control-flow and label anchors") {
  auto sub_from = [](const char* text) {
    return parse_program(text, "t").subroutines[0];
  };
  // write-read dependency blocks the swap
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  mov eax, 1\n  mov ebx, eax\nendp"), 0));
  // write-write on the same register blocks
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  mov eax, 1\n  mov eax, 2\nendp"), 0));
  // flags dependency: both write flags
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  add eax, 1\n  sub ebx, 1\nendp"), 0));
  // memory: two stores may alias
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  mov [esi], eax\n  mov [edi], ebx\nendp"), 0));
  // control transfers are anchors
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  jmp out\n  mov eax, 1\nendp"), 0));
  // labels pin their neighborhood
  CHECK(!can_swap_adjacent(
      sub_from("proc f\n  mov eax, 1\nlp:\n  mov ebx, 2\nendp"), 0));
  // independent pair swaps
  CHECK(can_swap_adjacent(
      sub_from("proc f\n  mov eax, 1\n  mov ebx, 2\nendp"), 0));
}

TEST_CASE("permute: histograms preserved on random programs (property)") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    Program p = testgen::random_rich_program(rng, "t");
    MutationConfig cfg{rng(), Technique::permute, 1.0, std::nullopt};
    Program mutated = permute_instructions(p, cfg);
    REQUIRE(mutated.subroutines.size() == p.subroutines.size());
    for (std::size_t s = 0; s < p.subroutines.size(); ++s) {
      if (p.subroutines[s].body.empty()) continue;
      CHECK(build_histogram(mutated.subroutines[s]).bins ==
            build_histogram(p.subroutines[s]).bins);
    }
    CHECK(symmetric_distance(extract_features(p), extract_features(mutated)) ==
          0.0);
  }
}

TEST_CASE("transpose_modules: reorder only") {
  Program p = parse_program(
      "proc f\n  mov eax, 0\nendp\nproc g\n  push ecx\nendp\nproc h\n  pop "
      "edx\nendp",
      "t");
  MutationConfig cfg{9, Technique::transpose_modules, 0.0, std::nullopt};
  Program shuffled = transpose_modules(p, cfg);
  REQUIRE(shuffled.subroutines.size() == 3);
  // same subroutines as a set, bodies byte-identical
  for (const Subroutine& sub : p.subroutines) {
    auto it = std::find_if(shuffled.subroutines.begin(),
                           shuffled.subroutines.end(),
                           [&](const Subroutine& s) { return s.name == sub.name; });
    REQUIRE(it != shuffled.subroutines.end());
    CHECK(*it == sub);
  }
  CHECK(histogram_multisets_equal(extract_features(p),
                                  extract_features(shuffled)));
  CHECK(symmetric_distance(extract_features(p), extract_features(shuffled)) ==
        0.0);

  Program single = parse_program("proc f\n  mov eax, 0\nendp", "t");
  CHECK(transpose_modules(single, cfg) == single);
}

TEST_CASE("make_family: lineage and composition") {
  Program base = parse_program(kRenameV1, "base");

  FamilyResult trivial = make_family(base, 1, {});
  REQUIRE(trivial.variants.size() == 1);
  CHECK(trivial.variants[0].subroutines == base.subroutines);
  CHECK(trivial.variants[0].id == "base_v001");

  std::vector<MutationConfig> preserving = {
      {100, Technique::regswap, 0.0, std::nullopt},
      {200, Technique::permute, 1.0, std::nullopt},
  };
  FamilyResult family = make_family(base, 5, preserving);
  REQUIRE(family.variants.size() == 5);
  HistogramSet base_features = extract_features(base);
  for (const Program& variant : family.variants)
    CHECK(symmetric_distance(base_features, extract_features(variant)) == 0.0);

  // distinct seeds per variant: ids and manifests both reflect it
  CHECK(family.manifest_json.find("base_v001") != std::string::npos);
  CHECK(family.manifest_json.find("base_v005") != std::string::npos);
  CHECK(family.manifest_json.find("\"base\"") != std::string::npos);
  CHECK(family.manifest_json.find("base_digest") != std::string::npos);

  FamilyResult again = make_family(base, 5, preserving);
  CHECK(again.manifest_json == family.manifest_json);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(serialize_program(again.variants[i]) ==
          serialize_program(family.variants[i]));

  FamilyResult noisy =
      make_family(base, 3, {{7, Technique::garbage_nop, 0.3, std::nullopt}});
  for (const Program& variant : noisy.variants)
    CHECK(symmetric_distance(base_features, extract_features(variant)) > 0.0);
}
