#include "crosswalk/datalog.hpp"

#include "crosswalk/error.hpp"

#include <algorithm>
#include <numeric>

namespace crosswalk::datalog {

std::string RuleViolation::message() const {
    if (variable.empty()) return "rule '" + rule_id + "': " + reason;
    return "rule '" + rule_id + "': head variable ?" + variable + " " + reason;
}

std::optional<RuleViolation> validate_rule(const Rule& rule) {
    if (rule.body.empty()) return RuleViolation{rule.id, {}, "has an empty body"};
    std::set<std::string> body_vars;
    for (const auto& atom : rule.body) {
        for (const Term* t : {&atom.subject, &atom.predicate, &atom.object}) {
            if (t->is_variable()) body_vars.insert(t->name);
        }
    }
    for (const Term* t : {&rule.head.subject, &rule.head.predicate, &rule.head.object}) {
        if (t->is_variable() && !body_vars.count(t->name)) {
            return RuleViolation{rule.id, t->name, "does not appear in the body"};
        }
    }
    return std::nullopt;
}

void require_valid(const std::vector<Rule>& rules) {
    for (const auto& rule : rules) {
        if (auto v = validate_rule(rule)) throw Error(ErrorCode::RangeRestriction, v->message());
    }
}

bool replays(const Rule& rule, const std::vector<Triple>& premises, const Triple& conclusion) {
    if (premises.size() != rule.body.size()) return false;
    std::map<std::string, std::string> binding;
    auto unify = [&](const Term& term, const std::string& value) {
        if (!term.is_variable()) return term.name == value;
        auto [it, inserted] = binding.emplace(term.name, value);
        return inserted || it->second == value;
    };
    for (std::size_t i = 0; i < premises.size(); ++i) {
        const auto& a = rule.body[i];
        const auto& p = premises[i];
        if (!unify(a.subject, p.subject) || !unify(a.predicate, p.predicate) || !unify(a.object, p.object)) {
            return false;
        }
    }
    auto resolve = [&](const Term& t) -> std::optional<std::string> {
        if (!t.is_variable()) return t.name;
        auto it = binding.find(t.name);
        if (it == binding.end()) return std::nullopt;
        return it->second;
    };
    auto s = resolve(rule.head.subject);
    auto p = resolve(rule.head.predicate);
    auto o = resolve(rule.head.object);
    return s && p && o && Triple{*s, *p, *o} == conclusion;
}

// ---------------------------------------------------------------------------
// SymbolTable / FactStore

SymbolTable::SymbolTable(std::vector<std::string> sorted_unique) : names_(std::move(sorted_unique)) {
    ids_.reserve(names_.size());
    for (SymbolId i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], i);
}

std::optional<SymbolId> SymbolTable::find(const std::string& text) const {
    auto it = ids_.find(text);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

Triple FactStore::triple(FactId id) const {
    const auto& f = facts_[id];
    return {symbols_.name(f.subject), symbols_.name(f.predicate), symbols_.name(f.object)};
}

std::optional<FactId> FactStore::find(const Triple& t) const {
    auto s = symbols_.find(t.subject);
    auto p = symbols_.find(t.predicate);
    auto o = symbols_.find(t.object);
    if (!s || !p || !o) return std::nullopt;
    auto it = ids_.find(Fact{*s, *p, *o});
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::size_t FactStore::round_of(FactId id) const {
    auto it = std::upper_bound(round_start_.begin(), round_start_.end(), id);
    return static_cast<std::size_t>(it - round_start_.begin());
}

std::pair<FactId, FactId> FactStore::delta_range(std::size_t round) const {
    if (round == 0 || round > round_start_.size()) return {0, 0};
    const FactId begin = round_start_[round - 1];
    const FactId end = round < round_start_.size() ? round_start_[round] : static_cast<FactId>(facts_.size());
    return {begin, end};
}

std::span<const Fact> FactStore::delta(std::size_t round) const {
    auto [begin, end] = delta_range(round);
    return std::span<const Fact>(facts_).subspan(begin, end - begin);
}

std::set<Triple> FactStore::triples() const {
    std::set<Triple> out;
    for (FactId id = 0; id < facts_.size(); ++id) out.insert(triple(id));
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation accessors

std::size_t Evaluation::rule_of(FactId id) const {
    if (!has_trace(id)) throw Error(ErrorCode::UnknownFact, "fact " + std::to_string(id) + " is asserted");
    return traces_[id - store_.initial_count()].rule;
}

std::span<const FactId> Evaluation::premises_of(FactId id) const {
    if (!has_trace(id)) return {};
    const auto& rec = traces_[id - store_.initial_count()];
    return std::span<const FactId>(premise_ids_).subspan(rec.first_premise, rules_[rec.rule].body.size());
}

Trace Evaluation::trace(FactId id) const {
    Trace t;
    t.conclusion = store_.triple(id);
    t.rule_id = rules_[rule_of(id)].id;
    for (FactId p : premises_of(id)) t.premises.push_back(store_.triple(p));
    return t;
}

std::optional<Trace> Evaluation::trace(const Triple& fact) const {
    auto id = store_.find(fact);
    if (!id || !has_trace(*id)) return std::nullopt;
    return trace(*id);
}

std::map<Triple, Trace> Evaluation::trace_map() const {
    std::map<Triple, Trace> out;
    for (FactId id = static_cast<FactId>(store_.initial_count()); id < store_.size(); ++id) {
        out.emplace(store_.triple(id), trace(id));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Seminaive evaluator

namespace {

constexpr std::uint32_t kNoSlot = UINT32_MAX;

// A term resolved against the symbol table: a constant id or a variable slot.
struct CTerm {
    bool variable = false;
    std::uint32_t value = 0; // SymbolId or slot
};

struct CAtom {
    CTerm terms[3];
};

struct CRule {
    std::vector<CAtom> body;
    CAtom head;
    std::uint32_t slots = 0;
};

inline std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

class Evaluator {
public:
    Evaluator(std::span<const Triple> input, const std::vector<Rule>& rules) {
        require_valid(rules);
        result_.rules_ = rules;
        build_symbols(input, rules);
        compile(rules);
        auto& store = result_.store_;
        store.facts_.reserve(input.size());
        for (const auto& t : input) {
            Fact f{*store.symbols_.find(t.subject), *store.symbols_.find(t.predicate), *store.symbols_.find(t.object)};
            insert(f);
        }
    }

    Evaluation run() && {
        auto& store = result_.store_;
        FactId delta_begin = 0;
        FactId delta_end = static_cast<FactId>(store.facts_.size());
        while (delta_begin < delta_end) {
            const FactId round_begin = static_cast<FactId>(store.facts_.size());
            for (std::uint32_t r = 0; r < crules_.size(); ++r) apply(r, delta_begin, delta_end);
            const FactId round_end = static_cast<FactId>(store.facts_.size());
            if (round_end > round_begin) store.round_start_.push_back(round_begin);
            delta_begin = round_begin;
            delta_end = round_end;
        }
        return std::move(result_);
    }

private:

    void build_symbols(std::span<const Triple> input, const std::vector<Rule>& rules) {
        std::vector<std::string> names;
        names.reserve(input.size() * 3);
        for (const auto& t : input) {
            names.push_back(t.subject);
            names.push_back(t.predicate);
            names.push_back(t.object);
        }
        for (const auto& rule : rules) {
            for (const auto* atom : body_and_head(rule)) {
                for (const Term* term : {&atom->subject, &atom->predicate, &atom->object}) {
                    if (!term->is_variable()) names.push_back(term->name);
                }
            }
        }
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        result_.store_.symbols_ = SymbolTable(std::move(names));
    }

    static std::vector<const Atom*> body_and_head(const Rule& rule) {
        std::vector<const Atom*> atoms;
        for (const auto& a : rule.body) atoms.push_back(&a);
        atoms.push_back(&rule.head);
        return atoms;
    }

    void compile(const std::vector<Rule>& rules) {
        const auto& symbols = result_.store_.symbols_;
        for (const auto& rule : rules) {
            CRule cr;
            std::map<std::string, std::uint32_t> slots;
            auto resolve = [&](const Term& t, bool in_body) {
                CTerm ct;
                if (!t.is_variable()) {
                    ct.value = *symbols.find(t.name);
                    return ct;
                }
                ct.variable = true;
                auto it = slots.find(t.name);
                if (it == slots.end()) {
                    // validate_rule guarantees head variables are bound.
                    if (!in_body) throw Error(ErrorCode::RangeRestriction, "unbound head variable ?" + t.name);
                    it = slots.emplace(t.name, cr.slots++).first;
                }
                ct.value = it->second;
                return ct;
            };
            for (const auto& atom : rule.body) {
                cr.body.push_back(CAtom{{resolve(atom.subject, true), resolve(atom.predicate, true),
                                         resolve(atom.object, true)}});
            }
            cr.head = CAtom{{resolve(rule.head.subject, false), resolve(rule.head.predicate, false),
                             resolve(rule.head.object, false)}};
            crules_.push_back(std::move(cr));
        }
    }

    bool insert(const Fact& f) {
        auto& store = result_.store_;
        const FactId id = static_cast<FactId>(store.facts_.size());
        if (!store.ids_.emplace(f, id).second) return false;
        store.facts_.push_back(f);
        by_subject_[f.subject].push_back(id);
        by_object_[f.object].push_back(id);
        by_predicate_[f.predicate].push_back(id);
        by_pred_subject_[pack(f.predicate, f.subject)].push_back(id);
        by_pred_object_[pack(f.predicate, f.object)].push_back(id);
        return true;
    }

    // Binds the atom against a fact, extending `binding`. Slots bound by this
    // call are recorded in `newly` so the caller can undo them.
    static bool match(const CAtom& atom, const Fact& f, std::vector<std::uint32_t>& binding,
                      std::vector<std::uint32_t>& newly) {
        const SymbolId values[3] = {f.subject, f.predicate, f.object};
        for (int k = 0; k < 3; ++k) {
            const auto& t = atom.terms[k];
            if (!t.variable) {
                if (t.value != values[k]) return false;
            } else if (binding[t.value] == kNoSlot) {
                binding[t.value] = values[k];
                newly.push_back(t.value);
            } else if (binding[t.value] != values[k]) {
                return false;
            }
        }
        return true;
    }

    static std::optional<SymbolId> bound(const CTerm& t, const std::vector<std::uint32_t>& binding) {
        if (!t.variable) return t.value;
        if (binding[t.value] == kNoSlot) return std::nullopt;
        return binding[t.value];
    }

    // Candidate fact ids for an atom under the current binding, or nullptr
    // when every fact must be scanned.
    const std::vector<FactId>* candidates(const CAtom& atom, const std::vector<std::uint32_t>& binding) const {
        static const std::vector<FactId> kEmpty;
        auto s = bound(atom.terms[0], binding);
        auto p = bound(atom.terms[1], binding);
        auto o = bound(atom.terms[2], binding);
        auto lookup = [&](const auto& index, auto key) -> const std::vector<FactId>* {
            auto it = index.find(key);
            return it == index.end() ? &kEmpty : &it->second;
        };
        if (p && s) return lookup(by_pred_subject_, pack(*p, *s));
        if (p && o) return lookup(by_pred_object_, pack(*p, *o));
        if (s) return lookup(by_subject_, *s);
        if (o) return lookup(by_object_, *o);
        if (p) return lookup(by_predicate_, *p);
        return nullptr;
    }

    struct Pending {
        std::vector<std::uint32_t> bindings; // stride = slots
        std::vector<FactId> premises;        // stride = body size
        std::size_t count = 0;
    };

    // Joins the remaining body atoms (order[pos...]) and records complete
    // bindings. limit[j] bounds the fact ids usable for atom j.
    void join(const CRule& rule, const std::vector<std::size_t>& order, std::size_t pos,
              const std::vector<FactId>& limit, std::vector<std::uint32_t>& binding, std::vector<FactId>& chosen,
              Pending& out) const {
        if (pos == order.size()) {
            out.bindings.insert(out.bindings.end(), binding.begin(), binding.end());
            out.premises.insert(out.premises.end(), chosen.begin(), chosen.end());
            ++out.count;
            return;
        }
        const std::size_t j = order[pos];
        const auto& atom = rule.body[j];
        const auto& facts = result_.store_.facts_;
        std::vector<std::uint32_t> newly;
        auto try_fact = [&](FactId id) {
            newly.clear();
            if (match(atom, facts[id], binding, newly)) {
                chosen[j] = id;
                join(rule, order, pos + 1, limit, binding, chosen, out);
            }
            for (auto slot : newly) binding[slot] = kNoSlot;
        };
        if (const auto* list = candidates(atom, binding)) {
            for (FactId id : *list) {
                if (id >= limit[j]) break;
                try_fact(id);
            }
        } else {
            for (FactId id = 0; id < limit[j]; ++id) try_fact(id);
        }
    }

    void apply(std::uint32_t rule_index, FactId delta_begin, FactId delta_end) {
        const auto& rule = crules_[rule_index];
        const std::size_t k = rule.body.size();
        Pending pending;
        std::vector<std::uint32_t> binding(rule.slots, kNoSlot);
        std::vector<FactId> chosen(k, 0);
        std::vector<FactId> limit(k);
        std::vector<std::size_t> order;
        std::vector<std::uint32_t> newly;
        const auto& facts = result_.store_.facts_;

        for (std::size_t i = 0; i < k; ++i) {
            // Atoms before the delta atom read only older facts, atoms after
            // it read everything known at the start of the round. Together
            // this enumerates each new derivation exactly once.
            for (std::size_t j = 0; j < k; ++j) limit[j] = j < i ? delta_begin : delta_end;
            order.clear();
            for (std::size_t j = 0; j < k; ++j) {
                if (j != i) order.push_back(j);
            }
            for (FactId id = delta_begin; id < delta_end; ++id) {
                newly.clear();
                if (match(rule.body[i], facts[id], binding, newly)) {
                    chosen[i] = id;
                    join(rule, order, 0, limit, binding, chosen, pending);
                }
                for (auto slot : newly) binding[slot] = kNoSlot;
            }
        }
        if (pending.count == 0) return;

        std::vector<std::size_t> perm(pending.count);
        std::iota(perm.begin(), perm.end(), 0);
        const std::size_t stride = rule.slots;
        auto key = [&](std::size_t n) { return pending.bindings.begin() + static_cast<std::ptrdiff_t>(n * stride); };
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(key(a), key(a) + static_cast<std::ptrdiff_t>(stride), key(b),
                                                key(b) + static_cast<std::ptrdiff_t>(stride));
        });

        for (std::size_t n : perm) {
            const auto* b = &pending.bindings[n * stride];
            auto value = [&](const CTerm& t) { return t.variable ? b[t.value] : t.value; };
            Fact head{value(rule.head.terms[0]), value(rule.head.terms[1]), value(rule.head.terms[2])};
            if (!insert(head)) continue;
            result_.traces_.push_back(
                {rule_index, static_cast<std::uint32_t>(result_.premise_ids_.size())});
            result_.premise_ids_.insert(result_.premise_ids_.end(), pending.premises.begin() + static_cast<std::ptrdiff_t>(n * k),
                                        pending.premises.begin() + static_cast<std::ptrdiff_t>((n + 1) * k));
        }
    }

    Evaluation result_;
    std::vector<CRule> crules_;
    std::unordered_map<SymbolId, std::vector<FactId>> by_subject_;
    std::unordered_map<SymbolId, std::vector<FactId>> by_object_;
    std::unordered_map<SymbolId, std::vector<FactId>> by_predicate_;
    std::unordered_map<std::uint64_t, std::vector<FactId>> by_pred_subject_;
    std::unordered_map<std::uint64_t, std::vector<FactId>> by_pred_object_;
};

Evaluation seminaive_eval(std::span<const Triple> facts, const std::vector<Rule>& rules) {
    return Evaluator(facts, rules).run();
}

Evaluation seminaive_eval(const std::set<Triple>& facts, const std::vector<Rule>& rules) {
    std::vector<Triple> input(facts.begin(), facts.end());
    return seminaive_eval(std::span<const Triple>(input), rules);
}

// ---------------------------------------------------------------------------
// Explanations

std::size_t ExplanationNode::depth() const {
    std::size_t d = 0;
    for (const auto& p : premises) d = std::max(d, p.depth() + 1);
    return d;
}

namespace {

ExplanationNode expand(FactId id, const Evaluation& ev) {
    ExplanationNode node;
    node.fact = ev.facts().triple(id);
    node.round = ev.facts().round_of(id);
    if (!ev.has_trace(id)) return node;
    node.asserted = false;
    node.rule_id = ev.rules()[ev.rule_of(id)].id;
    // Premises always come from strictly earlier rounds, so this recursion
    // terminates.
    for (FactId p : ev.premises_of(id)) node.premises.push_back(expand(p, ev));
    return node;
}

} // namespace

ExplanationNode explain(const Triple& fact, const Evaluation& evaluation) {
    auto id = evaluation.facts().find(fact);
    if (!id) throw Error(ErrorCode::UnknownFact, "fact not in closure: " + fact.str());
    return expand(*id, evaluation);
}

} // namespace crosswalk::datalog
