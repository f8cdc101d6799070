#include "perclab/inequalities.hpp"

namespace perclab {

const InequalityResult& InequalityReport::by_id(const std::string& id) const {
    for (const auto& r : results)
        if (r.id == id) return r;
    throw invalid_error("no inequality named '" + id + "'");
}

InequalityReport evaluate_inequalities(const PartitionDistribution& rho) {
    if (rho.k != 3) throw invalid_error("inequality suite requires exactly 3 terminals");
    rho.validate();

    const Rational& abc = rho.probs[p3::ABC];
    const Rational& ab_c = rho.probs[p3::AB_C];
    const Rational& ac_b = rho.probs[p3::AC_B];
    const Rational& a_bc = rho.probs[p3::A_BC];
    const Rational& split = rho.probs[p3::SPLIT];

    Rational p_ac = abc + ac_b;          // a~c
    Rational p_bc = abc + a_bc;          // b~c
    Rational p_ac_or_bc = abc + ac_b + a_bc;
    Rational a_isolated = a_bc + split;  // a|b & a|c
    Rational a_joined = abc + ab_c + ac_b;  // ab v ac
    Rational two_block = ab_c + ac_b + a_bc;

    InequalityReport report;
    auto add = [&report](std::string id, std::string stmt, const Rational& lhs,
                         const Rational& rhs, bool applicable = true, bool identity = false) {
        InequalityResult r;
        r.id = std::move(id);
        r.statement = std::move(stmt);
        r.applicable = applicable;
        r.lhs = lhs;
        r.rhs = rhs;
        r.residual = rhs - lhs;
        r.satisfied = identity ? (lhs == rhs) : (lhs <= rhs);
        report.results.push_back(std::move(r));
    };

    add("split_bound", "P(a!~b & a!~c)*P(a~b | a~c) <= P(ab|c)+P(ac|b)+P(a|bc)",
        a_isolated * a_joined, two_block);
    add("split_bound_strong",
        "P(a!~b & a!~c)*P(a~b | a~c) <= P(ab|c)+P(ac|b)+P(a|bc)-P(ab|c)^2-P(ac|b)^2",
        a_isolated * a_joined, two_block - ab_c * ab_c - ac_b * ac_b);
    add("pair_product_bound",
        "P(ab|c)P(ac|b)+P(ab|c)P(a|bc)+P(ac|b)P(a|bc) <= P(abc)P(a|b|c)",
        ab_c * ac_b + ab_c * a_bc + ac_b * a_bc, abc * split);
    add("separator_product", "P(ab|c)*P(a~c | b~c) <= P(abc)-P(a~c)P(b~c)",
        ab_c * p_ac_or_bc, abc - p_ac * p_bc);

    bool zero_sep = (ab_c == 0);
    add("zero_separator_factorization_products", "P(a|b|c)P(abc) = P(ac|b)P(a|bc) when P(ab|c)=0",
        split * abc, ac_b * a_bc, zero_sep, /*identity=*/true);
    add("zero_separator_factorization_cut", "P(abc) = P(a~c)P(b~c) when P(ab|c)=0",
        abc, p_ac * p_bc, zero_sep, /*identity=*/true);

    return report;
}

}  // namespace perclab
