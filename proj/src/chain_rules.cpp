#include "crosswalk/chain_rules.hpp"

#include "crosswalk/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace crosswalk {

namespace detail {
// Generated from rules/sssom_chain.rules at configure time.
extern const char* const kDefaultRulesText;
} // namespace detail

using datalog::Atom;
using datalog::Rule;
using datalog::Term;
using datalog::Triple;

namespace {

[[noreturn]] void syntax_error(std::size_t line_no, const std::string& what) {
    throw Error(ErrorCode::RuleSyntax, "line " + std::to_string(line_no) + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_rule_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

bool is_ident(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

Term parse_term(std::string_view token, std::size_t line_no) {
    if (token.front() == '?') {
        const auto name = token.substr(1);
        if (!is_ident(name)) syntax_error(line_no, "invalid variable '" + std::string(token) + "'");
        return Term::variable(std::string(name));
    }
    try {
        parse_curie(token);
    } catch (const Error&) {
        syntax_error(line_no, "constant '" + std::string(token) + "' is not a CURIE");
    }
    return Term::constant(std::string(token));
}

Atom parse_atom(std::string_view text, std::size_t line_no) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const auto start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    if (tokens.size() != 3) {
        syntax_error(line_no, "atom '" + std::string(trim(text)) + "' must have exactly three terms");
    }
    return Atom{parse_term(tokens[0], line_no), parse_term(tokens[1], line_no), parse_term(tokens[2], line_no)};
}

Rule parse_rule_line(std::string_view line, std::size_t line_no) {
    constexpr std::string_view kKeyword = "rule";
    if (line.substr(0, kKeyword.size()) != kKeyword || line.size() == kKeyword.size() ||
        !std::isspace(static_cast<unsigned char>(line[kKeyword.size()]))) {
        syntax_error(line_no, "expected 'rule <id>: ...'");
    }
    auto rest = line.substr(kKeyword.size());
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) syntax_error(line_no, "missing ':' after rule id");
    const auto id = trim(rest.substr(0, colon));
    if (!is_rule_id(id)) syntax_error(line_no, "invalid rule id '" + std::string(id) + "'");
    rest = rest.substr(colon + 1);

    const auto arrow = rest.find("=>");
    if (arrow == std::string_view::npos) syntax_error(line_no, "missing '=>'");
    if (rest.find("=>", arrow + 2) != std::string_view::npos) syntax_error(line_no, "more than one '=>'");
    const auto body_text = rest.substr(0, arrow);
    const auto head_text = rest.substr(arrow + 2);

    Rule rule;
    rule.id = std::string(id);
    std::size_t start = 0;
    while (true) {
        const auto comma = body_text.find(',', start);
        const auto piece = body_text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        rule.body.push_back(parse_atom(piece, line_no));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    rule.head = parse_atom(head_text, line_no);
    return rule;
}

} // namespace

RuleFile parse_rule_file(std::string_view text, std::string source_name) {
    RuleFile file;
    file.source_name = std::move(source_name);
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        const auto line = trim(raw);
        if (!line.empty() && line.front() != '#') {
            Rule rule = parse_rule_line(line, line_no);
            if (!ids.insert(rule.id).second) {
                throw Error(ErrorCode::DuplicateRule,
                            file.source_name + ":" + std::to_string(line_no) + ": duplicate rule id '" + rule.id + "'");
            }
            if (auto v = datalog::validate_rule(rule)) {
                throw Error(ErrorCode::RangeRestriction,
                            file.source_name + ":" + std::to_string(line_no) + ": " + v->message());
            }
            file.rules.push_back(std::move(rule));
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return file;
}

std::string serialize_rule(const Rule& rule) {
    std::string out = "rule " + rule.id + ": ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out += " , ";
        out += rule.body[i].str();
    }
    out += " => " + rule.head.str();
    return out;
}

std::string serialize_rule_file(const RuleFile& file) {
    std::string out;
    for (const auto& rule : file.rules) out += serialize_rule(rule) + "\n";
    return out;
}

std::string_view default_rules_text() { return detail::kDefaultRulesText; }

const RuleFile& default_rules() {
    static const RuleFile rules = parse_rule_file(default_rules_text(), "sssom_chain.rules");
    return rules;
}

RuleFile select_rules(const RuleFile& file, const std::vector<std::string>& ids) {
    RuleFile out;
    out.source_name = file.source_name;
    for (const auto& rule : file.rules) {
        if (std::find(ids.begin(), ids.end(), rule.id) != ids.end()) out.rules.push_back(rule);
    }
    return out;
}

Triple mapping_to_fact(const Mapping& m) {
    return Triple{m.subject_id.str(), m.predicate_id.str(), m.object_id.str()};
}

Mapping fact_to_mapping(const Triple& fact, const StampDescriptor& stamp) {
    Mapping m;
    try {
        m.subject_id = parse_curie(fact.subject);
        m.predicate_id = parse_curie(fact.predicate);
        m.object_id = parse_curie(fact.object);
    } catch (const Error& e) {
        throw Error(ErrorCode::ContractViolation, std::string("fact is not a CURIE triple: ") + e.what());
    }
    if (stamp.labels) {
        if (auto it = stamp.labels->find(fact.subject); it != stamp.labels->end()) m.subject_label = it->second;
        if (auto it = stamp.labels->find(fact.object); it != stamp.labels->end()) m.object_label = it->second;
    }
    m.mapping_justification = parse_curie(kMappingChaining);
    m.confidence = stamp.confidence;
    m.mapping_tool = stamp.tool_name;
    m.mapping_set_id = stamp.mapping_set_id;
    return m;
}

Mapping fact_to_mapping(const Atom& fact, const StampDescriptor& stamp) {
    if (!fact.is_ground()) {
        throw Error(ErrorCode::ContractViolation, "cannot convert non-ground atom '" + fact.str() + "'");
    }
    return fact_to_mapping(Triple{fact.subject.name, fact.predicate.name, fact.object.name}, stamp);
}

} // namespace crosswalk
