#pragma once

#include <map>
#include <vector>

namespace specshadow {

/// Dimensions of the three graded pieces (weights 0, -1, -2).
struct WeightProfile {
    int n0 = 0;
    int n1 = 0;
    int n2 = 0;
};

/// entries[k] = number of degree-d monomials whose variables contribute
/// total weight -k (k = q + 2r over the three variable groups).
struct WeightTable {
    int degree = 0;
    std::map<int, long long> entries;

    long long at(int k) const;
    long long total() const;
};

/// Closed-form count by convolution of the three multiset-coefficient
/// families. Exact integer arithmetic.
WeightTable weight_table(const WeightProfile& profile, int d);

struct SymReport {
    bool pass = false;
    WeightTable table;       ///< closed-form route
    WeightTable enumerated;  ///< brute-force symmetric-power route
};

/// Recomputes the table by enumerating the monomial basis of the d-th
/// symmetric power and compares entry by entry.
SymReport sym_check(const WeightProfile& profile, int d);

/// Sum of (k+1) * n_k over the table; throws NegativeWeight on k < 0.
long long twistor_h0(const std::map<int, long long>& weights);

struct ProductReport {
    bool pass = false;
    long long pairs_checked = 0;
};

/// Exhaustively checks weight additivity of monomial products up to total
/// degree n (truncation only drops monomials, never changes weights).
ProductReport filtration_product_check(const WeightProfile& profile, int n);

}  // namespace specshadow
