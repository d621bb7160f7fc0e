#pragma once
// Rule files and the bridge between SSSOM mappings and engine facts.
//
// Grammar, one construct per line:
//   rule <id>: <atom> (, <atom>)* => <atom>
//   # comment
// Atoms are three whitespace-separated terms; '?name' is a variable,
// anything else a CURIE constant. Ids match [A-Za-z0-9_.-]+.

#include "crosswalk/datalog.hpp"
#include "crosswalk/sssom.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crosswalk {

struct RuleFile {
    std::vector<datalog::Rule> rules;
    std::string source_name;
};

// Throws Error(RuleSyntax) with the line number, Error(DuplicateRule), or
// Error(RangeRestriction) naming the head variable.
RuleFile parse_rule_file(std::string_view text, std::string source_name = "<memory>");
std::string serialize_rule(const datalog::Rule& rule);
std::string serialize_rule_file(const RuleFile& file);

// Bundled SSSOM chain rules.
const RuleFile& default_rules();
std::string_view default_rules_text();

// Keeps only the named rules, in file order.
RuleFile select_rules(const RuleFile& file, const std::vector<std::string>& ids);

datalog::Triple mapping_to_fact(const Mapping& m);

inline constexpr std::string_view kMappingChaining = "SEMAPV:MappingChaining";

struct StampDescriptor {
    std::string mapping_set_id;
    std::string tool_name;
    std::optional<double> confidence;
    const std::map<std::string, std::string>* labels = nullptr; // CURIE text -> label
};

// Throws Error(ContractViolation) for non-CURIE terms or non-ground atoms.
Mapping fact_to_mapping(const datalog::Triple& fact, const StampDescriptor& stamp);
Mapping fact_to_mapping(const datalog::Atom& fact, const StampDescriptor& stamp);

} // namespace crosswalk
