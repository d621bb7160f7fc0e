// Reference fixpoint: every round applies every rule to every known fact
// with plain nested loops. Slow on purpose; used to check the seminaive
// evaluator.

#include "crosswalk/datalog.hpp"

#include <array>
#include <map>

namespace crosswalk::datalog {

namespace {

using NaiveFact = std::array<int, 3>;

struct NaivePattern {
    // >= 0: constant id, < 0: variable -(slot + 1)
    std::array<int, 3> terms;
};

constexpr int kUnbound = -1;

bool unify(const NaivePattern& pattern, const NaiveFact& fact, std::vector<int>& binding,
           std::vector<int>& bound_here) {
    for (int k = 0; k < 3; ++k) {
        const int t = pattern.terms[k];
        if (t >= 0) {
            if (t != fact[k]) return false;
            continue;
        }
        int& slot = binding[-t - 1];
        if (slot == kUnbound) {
            slot = fact[k];
            bound_here.push_back(-t - 1);
        } else if (slot != fact[k]) {
            return false;
        }
    }
    return true;
}

void derive(const std::vector<NaivePattern>& body, const NaivePattern& head, std::size_t pos,
            const std::vector<NaiveFact>& facts, std::vector<int>& binding, std::set<NaiveFact>& out) {
    if (pos == body.size()) {
        NaiveFact f;
        for (int k = 0; k < 3; ++k) f[k] = head.terms[k] >= 0 ? head.terms[k] : binding[-head.terms[k] - 1];
        out.insert(f);
        return;
    }
    std::vector<int> bound_here;
    for (const auto& fact : facts) {
        bound_here.clear();
        if (unify(body[pos], fact, binding, bound_here)) derive(body, head, pos + 1, facts, binding, out);
        for (int slot : bound_here) binding[slot] = kUnbound;
    }
}

} // namespace

std::set<Triple> naive_eval(const std::set<Triple>& facts, const std::vector<Rule>& rules) {
    require_valid(rules);

    std::map<std::string, int> ids;
    std::vector<std::string> names;
    auto intern = [&](const std::string& s) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(names.size()));
        if (inserted) names.push_back(s);
        return it->second;
    };

    struct NaiveRule {
        std::vector<NaivePattern> body;
        NaivePattern head;
        std::size_t variables = 0;
    };
    std::vector<NaiveRule> compiled;
    for (const auto& rule : rules) {
        std::map<std::string, int> vars;
        auto term = [&](const Term& t) {
            if (!t.is_variable()) return intern(t.name);
            auto [it, inserted] = vars.emplace(t.name, -static_cast<int>(vars.size()) - 1);
            return it->second;
        };
        NaiveRule nr;
        for (const auto& a : rule.body) nr.body.push_back({{term(a.subject), term(a.predicate), term(a.object)}});
        nr.head = {{term(rule.head.subject), term(rule.head.predicate), term(rule.head.object)}};
        nr.variables = vars.size();
        compiled.push_back(std::move(nr));
    }

    std::set<NaiveFact> known;
    for (const auto& t : facts) known.insert({intern(t.subject), intern(t.predicate), intern(t.object)});

    while (true) {
        std::vector<NaiveFact> snapshot(known.begin(), known.end());
        std::set<NaiveFact> derived;
        for (const auto& rule : compiled) {
            std::vector<int> binding(rule.variables, kUnbound);
            derive(rule.body, rule.head, 0, snapshot, binding, derived);
        }
        const auto before = known.size();
        known.insert(derived.begin(), derived.end());
        if (known.size() == before) break;
    }

    std::set<Triple> out;
    for (const auto& f : known) out.insert({names[f[0]], names[f[1]], names[f[2]]});
    return out;
}

} // namespace crosswalk::datalog
