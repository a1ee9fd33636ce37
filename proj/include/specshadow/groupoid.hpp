#pragma once

#include <map>
#include <string>
#include <vector>

#include "specshadow/config.hpp"
#include "specshadow/kms.hpp"

namespace specshadow {

/// Generator kinds of the gauge groupoid at a puncture t of a rank-r shadow:
///   H(t)   : theta' = (theta_r + lambda, theta_1, ..., theta_{r-1}), degree -1
///   T(t,i) : swaps slots i, i+1; defined only where theta_i != theta_{i+1}
///   U(t)   : theta_i -> theta_i - lambda on every slot, degree +r
enum class GenKind { H, T, U };

struct Generator {
    GenKind kind = GenKind::H;
    std::string puncture;
    int slot = 1;  ///< 1-based left slot for T; ignored for H and U
};

/// One word factor: a generator or its formal inverse.
struct Factor {
    Generator gen;
    bool inverse = false;
};

/// A word in the generators. The serialized form reads right to left
/// (rightmost factor applies first); factors() returns application order.
class GroupoidWord {
public:
    GroupoidWord() = default;
    explicit GroupoidWord(std::vector<Factor> in_application_order)
        : factors_(std::move(in_application_order)) {}

    /// Parses "U(t1) H(t1)^3 T(t2,1)^-1"; powers expand, negative powers
    /// mean formal inverses. Throws SchemaError on malformed text.
    static GroupoidWord parse(const std::string& text);

    /// Serializes rightmost-first, compressing runs into powers.
    std::string str() const;

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t size() const { return factors_.size(); }
    bool empty() const { return factors_.empty(); }

    void push(Factor f) { factors_.push_back(std::move(f)); }
    void append(const GroupoidWord& w);  ///< w applies after this word
    GroupoidWord inverse() const;

private:
    std::vector<Factor> factors_;
};

/// Chart tag for a residue shadow. Conjugate-chart shadows carry the same
/// structure but their monodromy eigenvalues are read with the loop
/// orientation reversed (see rh.hpp).
enum class Chart { Standard, Conjugate };

struct PunctureShadow {
    std::string label;
    std::vector<cplx> theta;
};

/// A parameter value, the ordered residual-eigenvalue tuple at each puncture,
/// and the accumulated degree bookkeeping.
struct ResidueShadow {
    cplx lambda{0.0, 0.0};
    std::vector<PunctureShadow> punctures;
    long degree_offset = 0;
    Chart chart = Chart::Standard;

    int puncture_index(const std::string& label) const;
    /// Common tuple length; throws SchemaError if punctures disagree.
    int rank() const;
};

/// Requires |theta values| pairwise equal tuples etc. within eps; degree and
/// chart compare exactly.
bool shadows_equal(const ResidueShadow& s1, const ResidueShadow& s2, double eps);

/// theta_i - theta_j != c * lambda with i < j (0-based slots).
struct DomainConstraint {
    int i = 0;
    int j = 0;
    long c = 0;
    friend auto operator<=>(const DomainConstraint&, const DomainConstraint&) = default;
};

/// Affine action at one puncture: theta'_{sigma[i]} = theta_i + m[i] * lambda.
struct PunctureAction {
    std::vector<int> sigma;  ///< 0-based images, a permutation
    std::vector<long> m;     ///< lambda-shift per source slot
    std::vector<DomainConstraint> domain;  ///< sorted, deduplicated
};

/// Canonical form of a word: one PunctureAction per puncture plus the global
/// degree shift. Words are equal as partial automorphisms at generic
/// parameters iff their normal forms have the same sigma, m and degree.
class NormalForm {
public:
    NormalForm() = default;

    /// Identity on the given punctures at this rank.
    static NormalForm identity(int rank, const std::vector<std::string>& punctures);

    /// Composition: this word first, then next. Pulls next's domain
    /// constraints back through this action.
    NormalForm then(const NormalForm& next) const;

    NormalForm inverse() const;

    /// sigma, m and degree equal (domains are not compared).
    bool same_action(const NormalForm& other) const;

    bool is_identity() const;

    /// True iff no stored constraint is violated at the shadow's concrete
    /// (theta, lambda) values, to cfg.eps_eq.
    bool in_domain(const ResidueShadow& s, const Config& cfg = {}) const;

    /// Applies the affine action; throws DomainViolation if out of domain.
    ResidueShadow apply(const ResidueShadow& s, const Config& cfg = {}) const;

    long degree() const { return degree_; }
    const std::map<std::string, PunctureAction>& actions() const { return actions_; }
    PunctureAction& action(const std::string& label) { return actions_.at(label); }
    const PunctureAction& action(const std::string& label) const { return actions_.at(label); }

    void set_degree(long d) { degree_ = d; }
    void add_constraint(const std::string& label, DomainConstraint c);

private:
    std::map<std::string, PunctureAction> actions_;
    long degree_ = 0;
};

/// Applies one generator (or its formal inverse) to a concrete shadow.
/// Throws DomainViolation if a T hits equal eigenvalues to cfg.eps_eq.
ResidueShadow apply_generator(const Generator& g, const ResidueShadow& s,
                              const Config& cfg = {}, bool inverse = false);

/// Applies the word factor by factor (application order). DomainViolation
/// carries the index of the failing factor.
ResidueShadow apply_word(const GroupoidWord& w, const ResidueShadow& s,
                         const Config& cfg = {});

/// Folds the word into its normal form over the given punctures.
NormalForm normal_form(const GroupoidWord& w, int rank,
                       const std::vector<std::string>& punctures);

/// True iff both words are defined at s and produce equal shadows to
/// cfg.eps_eq. Propagates DomainViolation if either is undefined.
bool words_agree_at(const GroupoidWord& w1, const GroupoidWord& w2,
                    const ResidueShadow& s, const Config& cfg = {});

/// Builds a word moving every Re(theta_i / lambda) into (-1, 0] and returns
/// it with the normalized shadow. Requires lambda != 0 (LambdaZero) and
/// enough genericity for the intermediate swaps (DomainViolation otherwise).
std::pair<GroupoidWord, ResidueShadow> deligne_normalize(const ResidueShadow& s,
                                                         const Config& cfg = {});

struct OrbitEntry {
    ResidueShadow shadow;
    NormalForm witness;  ///< normal form of the first word reaching the shadow
};

/// Deterministic BFS over in-domain generator and inverse applications up to
/// the given word length; shadows deduplicated to cfg.eps_eq.
std::vector<OrbitEntry> orbit(const ResidueShadow& s, int max_word_length,
                              const Config& cfg = {});

}  // namespace specshadow
