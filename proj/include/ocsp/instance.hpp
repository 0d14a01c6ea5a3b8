#pragma once

#include <map>
#include <string>
#include <vector>

#include "ocsp/predicate.hpp"
#include "ocsp/rational.hpp"

namespace ocsp {

// One weighted constraint: predicate pred applied to the ranks of vars.
// vars may repeat; the tie extension of the predicate handles it.
struct Constraint {
    std::vector<int> vars;
    int pred = 0;
    Rational weight = Rational(1);
};

// Weighted ordering CSP over named variables.
class OcspInstance {
public:
    int add_variable(const std::string& name);
    int variable_index(const std::string& name) const;  // -1 when absent
    int add_predicate(OrderingPredicate p);
    void add_constraint(std::vector<int> vars, int pred, const Rational& weight);
    // Scales weights to total 1. No-op on an empty instance.
    void normalize_weights();

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<OrderingPredicate>& predicates() const { return predicates_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    Rational weight_total() const;

private:
    std::vector<std::string> variables_;
    std::map<std::string, int> index_;
    std::vector<OrderingPredicate> predicates_;
    std::vector<Constraint> constraints_;
};

// Assignment of integer ranks to variables; ties allowed.
struct Ordering {
    std::map<std::string, long long> ranks;
};

// Weighted sum of extended payoffs under the given ranks.
// Throws UnrankedVariable if a constrained variable has no rank.
Rational ordering_value(const OcspInstance& inst, const Ordering& ord);

// Expected value of a uniformly random ordering: weighted sum of the
// predicates' random-ordering values.
Rational random_baseline(const OcspInstance& inst);

}  // namespace ocsp
