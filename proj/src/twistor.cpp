#include "specshadow/twistor.hpp"

#include <functional>
#include <string>

#include "specshadow/errors.hpp"

namespace specshadow {

namespace {

/// Multiset coefficient C(n + k - 1, k): monomials of degree k in n variables.
long long multiset_count(int n, int k) {
    if (k < 0 || n < 0) return 0;
    if (k == 0) return 1;
    if (n == 0) return 0;
    long long out = 1;
    for (int i = 1; i <= k; ++i) {
        out = out * (n + i - 1) / i;  // exact: product of i consecutive terms
    }
    return out;
}

void check_profile(const WeightProfile& profile) {
    if (profile.n0 < 0 || profile.n1 < 0 || profile.n2 < 0) {
        throw ConfigError("weight profile dimensions must be nonnegative");
    }
}

}  // namespace

long long WeightTable::at(int k) const {
    auto it = entries.find(k);
    return it == entries.end() ? 0 : it->second;
}

long long WeightTable::total() const {
    long long out = 0;
    for (const auto& [k, count] : entries) out += count;
    return out;
}

WeightTable weight_table(const WeightProfile& profile, int d) {
    check_profile(profile);
    if (d < 0) throw ConfigError("weight_table: degree must be nonnegative");
    WeightTable table;
    table.degree = d;
    for (int r = 0; 2 * r <= 2 * d; ++r) {
        for (int q = 0; q + r <= d; ++q) {
            int p = d - q - r;
            long long count = multiset_count(profile.n0, p) *
                              multiset_count(profile.n1, q) *
                              multiset_count(profile.n2, r);
            if (count > 0) table.entries[q + 2 * r] += count;
        }
    }
    return table;
}

SymReport sym_check(const WeightProfile& profile, int d) {
    check_profile(profile);
    if (d < 0) throw ConfigError("sym_check: degree must be nonnegative");
    SymReport report;
    report.table = weight_table(profile, d);
    report.enumerated.degree = d;

    const int vars = profile.n0 + profile.n1 + profile.n2;
    std::vector<int> weight(vars, 0);
    for (int v = 0; v < vars; ++v) {
        weight[v] = v < profile.n0 ? 0 : (v < profile.n0 + profile.n1 ? 1 : 2);
    }
    std::function<void(int, int, int)> place = [&](int v, int left, int k) {
        if (v == vars) {
            if (left == 0) report.enumerated.entries[k] += 1;
            return;
        }
        if (v == vars - 1) {
            report.enumerated.entries[k + left * weight[v]] += 1;
            return;
        }
        for (int e = 0; e <= left; ++e) {
            place(v + 1, left - e, k + e * weight[v]);
        }
    };
    if (vars == 0) {
        if (d == 0) report.enumerated.entries[0] += 1;
    } else {
        place(0, d, 0);
    }
    report.pass = report.enumerated.entries == report.table.entries;
    return report;
}

long long twistor_h0(const std::map<int, long long>& weights) {
    long long out = 0;
    for (const auto& [k, count] : weights) {
        if (k < 0) {
            throw NegativeWeight("weight " + std::to_string(k) +
                                 " has no section count");
        }
        out += static_cast<long long>(k + 1) * count;
    }
    return out;
}

ProductReport filtration_product_check(const WeightProfile& profile, int n) {
    check_profile(profile);
    if (n < 0) throw ConfigError("filtration_product_check: degree must be nonnegative");
    ProductReport report;

    const int vars = profile.n0 + profile.n1 + profile.n2;
    std::vector<int> weight(vars, 0);
    for (int v = 0; v < vars; ++v) {
        weight[v] = v < profile.n0 ? 0 : (v < profile.n0 + profile.n1 ? 1 : 2);
    }
    // Monomials of each degree as exponent vectors, with cached weights.
    struct Monomial {
        std::vector<int> exp;
        int w = 0;
    };
    std::vector<std::vector<Monomial>> by_degree(n + 1);
    std::vector<int> exp(vars, 0);
    std::function<void(int, int)> emit = [&](int v, int left) {
        if (v == vars) {
            if (left > 0) return;
            int w = 0;
            int d = 0;
            for (int u = 0; u < vars; ++u) {
                w += exp[u] * weight[u];
                d += exp[u];
            }
            by_degree[d].push_back({exp, w});
            return;
        }
        for (int e = 0; e <= left; ++e) {
            exp[v] = e;
            emit(v + 1, left - e);
        }
        exp[v] = 0;
    };
    for (int d = 0; d <= n; ++d) {
        if (vars == 0) {
            if (d == 0) by_degree[0].push_back({{}, 0});
            continue;
        }
        emit(0, d);
    }

    report.pass = true;
    for (int d1 = 0; d1 <= n; ++d1) {
        for (int d2 = 0; d1 + d2 <= n; ++d2) {
            for (const Monomial& a : by_degree[d1]) {
                for (const Monomial& b : by_degree[d2]) {
                    ++report.pairs_checked;
                    int w = 0;
                    for (int v = 0; v < vars; ++v) {
                        w += (a.exp[v] + b.exp[v]) * weight[v];
                    }
                    if (w != a.w + b.w) report.pass = false;
                }
            }
        }
    }
    return report;
}

}  // namespace specshadow
