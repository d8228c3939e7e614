#pragma once

#include <string>
#include <variant>

#include "cra/machine.hpp"

namespace cra {

using ParsedMachine = std::variant<Cra, WeightedAutomaton, LookaheadDfa>;

// Line-oriented machine format with '#' comments.  The header line selects
// the kind: "cra", "wa" or "dfa".  Parse errors carry line/column and the
// expectation; parsed machines pass core validation.
ParsedMachine parse_machine(const std::string& text);

Cra parse_cra(const std::string& text);
WeightedAutomaton parse_wa(const std::string& text);
LookaheadDfa parse_dfa(const std::string& text);

std::string print_machine(const Cra& m);
std::string print_machine(const WeightedAutomaton& wa);
std::string print_machine(const LookaheadDfa& a);

// Splits a word argument: one character per symbol when the whole alphabet
// is single-character, whitespace/comma separated otherwise.
Word parse_word(const std::string& text, const std::vector<Symbol>& alphabet);

// Fresh identifier based on `base` that is not already in `taken`.
std::string fresh_name(const std::vector<std::string>& taken, const std::string& base);

}  // namespace cra
