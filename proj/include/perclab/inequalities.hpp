#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perclab/partitions.hpp"

namespace perclab {

// Closed-form checks on a 3-terminal partition distribution
// rho = (P(abc), P(ab|c), P(ac|b), P(a|bc), P(a|b|c)).
//
//   split_bound         P(a|b & a|c)·P(ab v ac) <= P(ab|c)+P(ac|b)+P(a|bc)
//   split_bound_strong  same LHS <= RHS - P(ab|c)^2 - P(ac|b)^2
//   pair_product_bound  P(ab|c)P(ac|b)+P(ab|c)P(a|bc)+P(ac|b)P(a|bc) <= P(abc)P(a|b|c)
//   separator_product   P(ab|c)·P(ac v bc) <= P(abc) - P(ac)P(bc)
//                       (product form; algebraically equivalent to
//                        pair_product_bound, kept as its own named check)
//   zero_separator_factorization (only when P(ab|c) = 0)
//                       P(a|b|c)P(abc) = P(ac|b)P(a|bc)  and  P(abc) = P(ac)P(bc)

struct InequalityResult {
    std::string id;
    std::string statement;
    bool applicable = true;
    bool satisfied = false;
    Rational lhs, rhs;
    Rational residual;  // rhs - lhs; for identities, 0 iff satisfied
};

struct InequalityReport {
    std::vector<InequalityResult> results;
    bool all_satisfied() const {
        for (const auto& r : results)
            if (r.applicable && !r.satisfied) return false;
        return true;
    }
    const InequalityResult& by_id(const std::string& id) const;
};

/// rho must be a valid 3-terminal distribution.
InequalityReport evaluate_inequalities(const PartitionDistribution& rho);

}  // namespace perclab
