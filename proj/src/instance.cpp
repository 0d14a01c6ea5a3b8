#include "ocsp/instance.hpp"

namespace ocsp {

int OcspInstance::add_variable(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) throw SchemaError("duplicate variable name '" + name + "'");
    int id = static_cast<int>(variables_.size());
    variables_.push_back(name);
    index_[name] = id;
    return id;
}

int OcspInstance::variable_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int OcspInstance::add_predicate(OrderingPredicate p) {
    predicates_.push_back(std::move(p));
    return static_cast<int>(predicates_.size()) - 1;
}

void OcspInstance::add_constraint(std::vector<int> vars, int pred, const Rational& weight) {
    if (pred < 0 || pred >= static_cast<int>(predicates_.size()))
        throw SchemaError("constraint references unknown predicate");
    if (static_cast<int>(vars.size()) != predicates_[pred].arity())
        throw ArityMismatch("constraint tuple length does not match predicate arity");
    for (int v : vars)
        if (v < 0 || v >= static_cast<int>(variables_.size()))
            throw SchemaError("constraint references unknown variable");
    if (weight <= 0) throw SchemaError("constraint weight must be positive");
    constraints_.push_back({std::move(vars), pred, weight});
}

Rational OcspInstance::weight_total() const {
    Rational total(0);
    for (const auto& c : constraints_) total += c.weight;
    return total;
}

void OcspInstance::normalize_weights() {
    Rational total = weight_total();
    if (total == 0) return;
    for (auto& c : constraints_) c.weight /= total;
}

Rational ordering_value(const OcspInstance& inst, const Ordering& ord) {
    std::vector<long long> rank_of(inst.variables().size());
    std::vector<char> have(inst.variables().size(), 0);
    for (size_t i = 0; i < inst.variables().size(); ++i) {
        auto it = ord.ranks.find(inst.variables()[i]);
        if (it != ord.ranks.end()) {
            rank_of[i] = it->second;
            have[i] = 1;
        }
    }
    Rational value(0);
    std::vector<long long> tuple;
    for (const auto& c : inst.constraints()) {
        tuple.clear();
        for (int v : c.vars) {
            if (!have[v])
                throw UnrankedVariable("ordering has no rank for variable '" +
                                       inst.variables()[v] + "'");
            tuple.push_back(rank_of[v]);
        }
        value += c.weight * inst.predicates()[c.pred].extended_payoff(tuple);
    }
    return value;
}

Rational random_baseline(const OcspInstance& inst) {
    Rational value(0);
    for (const auto& c : inst.constraints())
        value += c.weight * inst.predicates()[c.pred].random_ordering_value();
    return value;
}

}  // namespace ocsp
