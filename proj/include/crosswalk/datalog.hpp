#pragma once
// Datalog over triple-shaped facts.
//
// Evaluation is seminaive: round r joins each rule against the facts first
// derived in round r-1 (the delta), so every derivation is enumerated once.
// Each derived fact keeps exactly one trace: the first derivation found when
// rules are visited in file order and, within a rule and round, bindings are
// visited in lexicographic order of their constants (variables ordered by
// first appearance in the body).
//
// naive_eval is the reference implementation used as a test oracle. It shares
// no code with the seminaive evaluator beyond the term types.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace crosswalk::datalog {

struct Term {
    enum class Kind : std::uint8_t { Variable, Constant };

    Kind kind = Kind::Constant;
    std::string name;

    static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
    static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }

    bool is_variable() const { return kind == Kind::Variable; }
    // "?A" for variables, the constant text otherwise.
    std::string str() const { return is_variable() ? "?" + name : name; }

    auto operator<=>(const Term&) const = default;
};

struct Atom {
    Term subject;
    Term predicate;
    Term object;

    bool is_ground() const {
        return !subject.is_variable() && !predicate.is_variable() && !object.is_variable();
    }
    std::string str() const { return subject.str() + " " + predicate.str() + " " + object.str(); }

    auto operator<=>(const Atom&) const = default;
};

// A ground atom.
struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;

    std::string str() const { return subject + " " + predicate + " " + object; }

    auto operator<=>(const Triple&) const = default;
};

struct Rule {
    std::string id;
    std::vector<Atom> body;
    Atom head;

    bool operator==(const Rule&) const = default;
};

struct RuleViolation {
    std::string rule_id;
    std::string variable; // offending head variable, empty for structural problems
    std::string reason;

    std::string message() const;
};

// Range restriction: every head variable must occur in the body. An empty
// body is also rejected.
std::optional<RuleViolation> validate_rule(const Rule& rule);

// Throws Error(RangeRestriction) naming the first invalid rule.
void require_valid(const std::vector<Rule>& rules);

// Least fixpoint by repeated application of every rule to every fact.
std::set<Triple> naive_eval(const std::set<Triple>& facts, const std::vector<Rule>& rules);

using SymbolId = std::uint32_t;
using FactId = std::uint32_t;

// Constants are numbered in lexicographic order of their text, so comparing
// ids compares strings.
class SymbolTable {
public:
    SymbolTable() = default;
    explicit SymbolTable(std::vector<std::string> sorted_unique);

    std::optional<SymbolId> find(const std::string& text) const;
    const std::string& name(SymbolId id) const { return names_[id]; }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, SymbolId> ids_;
};

struct Fact {
    SymbolId subject;
    SymbolId predicate;
    SymbolId object;

    bool operator==(const Fact&) const = default;
};

struct FactHash {
    std::size_t operator()(const Fact& f) const noexcept {
        std::uint64_t h = f.subject;
        h = h * 0x9E3779B97F4A7C15ULL ^ f.predicate;
        h = h * 0x9E3779B97F4A7C15ULL ^ f.object;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

// The closure. Fact ids are dense and assigned in derivation order: ids
// [0, initial_count()) are the input facts, then each round's delta follows
// as a contiguous block.
class FactStore {
public:
    std::size_t size() const { return facts_.size(); }
    const Fact& fact(FactId id) const { return facts_[id]; }
    Triple triple(FactId id) const;
    std::optional<FactId> find(const Triple& t) const;
    bool contains(const Triple& t) const { return find(t).has_value(); }

    std::size_t initial_count() const { return round_start_.empty() ? facts_.size() : round_start_[0]; }
    bool is_initial(FactId id) const { return id < initial_count(); }

    // Number of rounds that derived at least one fact.
    std::size_t round_count() const { return round_start_.size(); }
    // Round 0 for input facts, r >= 1 for facts first derived in round r.
    std::size_t round_of(FactId id) const;
    // Facts first derived in round r (1-based).
    std::span<const Fact> delta(std::size_t round) const;
    std::pair<FactId, FactId> delta_range(std::size_t round) const;

    std::set<Triple> triples() const;
    const SymbolTable& symbols() const { return symbols_; }

private:
    friend class Evaluator;

    SymbolTable symbols_;
    std::vector<Fact> facts_;
    std::unordered_map<Fact, FactId, FactHash> ids_;
    std::vector<FactId> round_start_; // first id of rounds 1..n
};

struct Trace {
    Triple conclusion;
    std::string rule_id;
    std::vector<Triple> premises;

    bool operator==(const Trace&) const = default;
};

class Evaluation {
public:
    const FactStore& facts() const { return store_; }
    const std::vector<Rule>& rules() const { return rules_; }

    bool has_trace(FactId id) const { return !store_.is_initial(id); }
    std::size_t trace_count() const { return store_.size() - store_.initial_count(); }
    // Index into rules() of the rule that derived the fact.
    std::size_t rule_of(FactId id) const;
    std::span<const FactId> premises_of(FactId id) const;

    Trace trace(FactId id) const;
    std::optional<Trace> trace(const Triple& fact) const;
    // Materialized map from inferred fact to trace. Intended for small inputs.
    std::map<Triple, Trace> trace_map() const;

private:
    friend class Evaluator;

    struct TraceRecord {
        std::uint32_t rule;
        std::uint32_t first_premise;
    };

    FactStore store_;
    std::vector<Rule> rules_;
    std::vector<TraceRecord> traces_; // indexed by id - initial_count()
    std::vector<FactId> premise_ids_;
};

// Throws Error(RangeRestriction) for invalid rules. Duplicate input facts are
// collapsed, keeping the first occurrence.
Evaluation seminaive_eval(std::span<const Triple> facts, const std::vector<Rule>& rules);
Evaluation seminaive_eval(const std::set<Triple>& facts, const std::vector<Rule>& rules);

struct ExplanationNode {
    Triple fact;
    bool asserted = true;
    std::string rule_id;  // empty for asserted leaves
    std::size_t round = 0;
    std::vector<ExplanationNode> premises;

    std::size_t depth() const;
};

// Expands the fact's trace recursively down to asserted facts. Throws
// Error(UnknownFact) when the fact is not in the closure.
ExplanationNode explain(const Triple& fact, const Evaluation& evaluation);

// Re-instantiates the rule against the premises and checks that a single
// consistent binding yields the conclusion.
bool replays(const Rule& rule, const std::vector<Triple>& premises, const Triple& conclusion);

} // namespace crosswalk::datalog
