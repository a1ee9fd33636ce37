#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "specshadow/config.hpp"
#include "specshadow/kms.hpp"

namespace specshadow {

using Matrix = Eigen::MatrixXcd;

struct BettiPuncture {
    std::string label;
    Matrix gamma;  ///< local monodromy
    Matrix flag;   ///< columns = ordered basis; V_j = span of the first j
};

/// Matrices for the surface group generators, one invariant complete flag per
/// puncture, and a framing of the fiber.
struct FilteredLocalSystem {
    int rank = 0;
    int genus = 0;
    std::vector<Matrix> a;  ///< genus-many
    std::vector<Matrix> b;  ///< genus-many
    std::vector<BettiPuncture> punctures;
    Matrix framing;

    int puncture_index(const std::string& label) const;
};

/// Graded eigenvalues per puncture, aligned with the system's puncture order:
/// alphas[t][j] is the action on V_{j+1}/V_j.
struct EigenvalueVector {
    std::vector<std::string> labels;
    std::vector<std::vector<cplx>> alphas;
};

/// Puncture label -> 0-based permutation images; missing labels mean identity.
using MultiPermutation = std::map<std::string, std::vector<int>>;

/// Checks the surface relation prod [a_i, b_i] * prod gamma_t = 1 to
/// cfg.eps_rel, flag shapes/invertibility, and gamma-invariance of each flag.
/// Throws SchemaError / FlagNotInvariant.
void validate_system(const FilteredLocalSystem& L, const Config& cfg = {});

/// Diagonal of the flag-adapted triangularization of each gamma.
/// Throws FlagNotInvariant if a flag is not gamma-invariant to cfg.eps_eq.
EigenvalueVector eigenvalue_map(const FilteredLocalSystem& L, const Config& cfg = {});

/// True iff for every puncture and every pair i < j inverted by sigma the
/// eigenvalues alpha_i, alpha_j differ by more than cfg.eps_eq.
bool in_domain(const MultiPermutation& sigma, const EigenvalueVector& ev,
               const Config& cfg = {});

/// Order in which a permutation is decomposed into adjacent transpositions.
/// Both orders are minimal-length; they exist so independent decompositions
/// can be compared.
enum class SwapOrder { LeftToRight, RightToLeft };

/// Replaces each flag by the sigma-rearranged one: each adjacent swap at
/// position i replaces the line V_{i+1}/V_i by the other eigenline of gamma
/// inside V_{i+2}/V_i. Matrices and framing are untouched. Eigenvalues
/// permute: eigenvalue_map(result)[t][sigma(i)] = eigenvalue_map(L)[t][i].
/// Throws DomainViolation if a swap meets equal eigenvalues.
FilteredLocalSystem flag_surgery(const MultiPermutation& sigma,
                                 const FilteredLocalSystem& L,
                                 const Config& cfg = {},
                                 SwapOrder order = SwapOrder::LeftToRight);

/// Dimension of { X : X commutes with every generator matrix and preserves
/// every flag step }, computed as the kernel dimension of the stacked linear
/// system. The system is irreducible in the filtered sense iff this is 1.
int commutant_dimension(const FilteredLocalSystem& L, const Config& cfg = {});

/// Largest principal angle between corresponding flag steps, maximized over
/// punctures and steps.
double flag_distance(const Matrix& flag1, const Matrix& flag2);
double system_flag_distance(const FilteredLocalSystem& L1, const FilteredLocalSystem& L2);

struct ComposeReport {
    bool pass = false;
    double max_angle = 0.0;
    std::string detail;
};

/// Verifies flag_surgery(tau, flag_surgery(sigma, L)) and
/// flag_surgery(tau o sigma, L) give the same flags to cfg.eps_flag.
ComposeReport compose_check(const MultiPermutation& tau, const MultiPermutation& sigma,
                            const FilteredLocalSystem& L, const Config& cfg = {});

/// Loads a FilteredLocalSystem document and re-validates its invariants.
FilteredLocalSystem system_from_json_text(const std::string& text,
                                          const std::string& source_name = "<input>",
                                          const Config& cfg = {});
FilteredLocalSystem system_from_json_file(const std::string& path, const Config& cfg = {});

}  // namespace specshadow
