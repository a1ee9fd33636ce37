#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specshadow/config.hpp"

namespace specshadow {

using cplx = std::complex<double>;

/// One spectrum element at a puncture: a parabolic level a and a residual
/// eigenvalue alpha. Representatives are kept with a in (-1, 0]; the integer
/// lattice acts by lattice_shift.
struct KmsPoint {
    double a = 0.0;
    cplx alpha{0.0, 0.0};
};

/// The rank-many spectrum elements at one puncture.
struct KmsSpectrum {
    int rank = 0;
    std::vector<KmsPoint> points;
};

struct Puncture {
    std::string label;
    KmsSpectrum spectrum;
};

/// Rank, punctures and their spectra: the finite data the whole engine runs on.
struct HarmonicShadow {
    int rank = 0;
    std::optional<int> genus;  // metadata only
    std::vector<Puncture> punctures;

    /// Index of the puncture with this label, or -1.
    int puncture_index(const std::string& label) const;
};

/// Level/eigenvalue pair of a spectrum element transported to parameter lambda.
struct FlowValue {
    double p = 0.0;
    cplx e{0.0, 0.0};
};

/// Transport of one spectrum element to parameter lambda:
///   p = a + 2 Re(lambda * conj(alpha)),  e = alpha - a*lambda + conj(alpha)*lambda^2.
/// p is real-analytic in lambda, e is holomorphic.
FlowValue flow(const KmsPoint& x, cplx lambda);

/// Integer lattice action on representatives: (a, alpha) -> (a + k, alpha).
/// Satisfies flow(lattice_shift(x, k), l) = flow(x, l) + k * (1, -l).
KmsPoint lattice_shift(const KmsPoint& x, int k);

/// The unique integer k with p + k in (anchor - 1, anchor].
int window_shift(double p, double anchor = 0.0);

struct SpectrumViolation {
    enum class Kind { LevelOutOfRange, Duplicate, NonFinite };
    Kind kind;
    int i = -1;  // offending indices (j = -1 for single-point violations)
    int j = -1;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<SpectrumViolation> violations;
};

/// Checks pairwise distinctness in (R/Z) x C to eps_eq (level differences are
/// reduced mod 1 into (-0.5, 0.5] before comparing) and that every level
/// representative lies in (-1, 0].
ValidationReport validate_spectrum(const KmsSpectrum& s, const Config& cfg = {});

/// All total orderings of (level, eigenvalue) pairs in which any two pairs
/// with equal eigenvalue appear in strictly increasing level order. Each
/// ordering is the list of input indices in order. Empty input yields the
/// single empty ordering.
std::vector<std::vector<int>> valid_orderings(
    const std::vector<std::pair<double, cplx>>& pairs, const Config& cfg = {});

/// Loads a HarmonicShadow document; schema violations raise SchemaError with
/// a line-anchored message. Does not run the distinctness check (see
/// validate_shadow).
HarmonicShadow shadow_from_json_text(const std::string& text,
                                     const std::string& source_name = "<input>");
HarmonicShadow shadow_from_json_file(const std::string& path);

/// Runs validate_spectrum at every puncture; throws HypothesisViolation on
/// duplicates and SchemaError on out-of-range levels.
void validate_shadow(const HarmonicShadow& shadow, const Config& cfg = {});

}  // namespace specshadow
