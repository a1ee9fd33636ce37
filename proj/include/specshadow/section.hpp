#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specshadow/config.hpp"
#include "specshadow/groupoid.hpp"
#include "specshadow/walls.hpp"

namespace specshadow {

/// One ordered slot of a section sample: which spectrum element it carries
/// (0-based kms_index), the window shift applied, and the shifted (p, e).
struct SectionSlot {
    int kms_index = 0;
    long rep_shift = 0;
    double p = 0.0;
    cplx e{0.0, 0.0};
};

struct SectionPuncture {
    std::string label;
    std::vector<SectionSlot> slots;
};

struct SectionSample {
    cplx lambda{0.0, 0.0};
    std::vector<SectionPuncture> punctures;
};

/// The preferred local ordering at lambda: every spectrum element is shifted
/// so its level lies in (anchor-1, anchor], then slots are sorted by level
/// ascending with lexicographic (Re e, Im e) tie-break. Throws
/// OrderingAmbiguous when two slots tie in both level and eigenvalue.
SectionSample local_order(const HarmonicShadow& shadow, cplx lambda,
                          const Config& cfg = {});

/// Re-evaluates a sample's frozen integer data (kms_index, rep_shift, order)
/// at another parameter value.
SectionSample evaluate_section(const HarmonicShadow& shadow,
                               const SectionSample& anchored, cplx lambda);

/// The residue shadow carried by a sample (e-tuples in slot order).
ResidueShadow to_residue_shadow(const SectionSample& sample);

/// Groupoid element relating two samples of the same family: sigma matches
/// slots through kms_index, m is the rep_shift difference, degree = -sum(m).
struct Transition {
    int from_sample = 0;
    int to_sample = 0;
    NormalForm word;
};

/// Computes the transition from s1 to s2. Domain constraints are the slot
/// pairs reordered by sigma; the transition must be in-domain at both
/// endpoint samples (DomainViolation means the step straddled a collision
/// point and needs refining).
Transition transition(const SectionSample& s1, const SectionSample& s2,
                      const Config& cfg = {});

struct TraceResult {
    std::vector<SectionSample> samples;               ///< includes bisection refinements
    std::vector<Transition> transitions;              ///< between consecutive samples
    std::optional<NormalForm> holonomy;               ///< composite, for closed paths
};

/// Samples the preferred ordering along a polyline and links consecutive
/// samples by transitions, bisecting a step up to 20 times when its
/// transition is out of domain. Requires the path to stay farther than
/// eps_path from every collision point (PathThroughWall otherwise).
TraceResult trace_path(const HarmonicShadow& shadow, const std::vector<cplx>& path,
                       const Config& cfg = {}, double eps_path = 1e-3);

struct CocycleReport {
    bool pass = false;
    int discs = 0;
    int overlaps = 0;
    int triples = 0;
    std::vector<std::string> failures;
};

/// Anchors one section per cover disc (integer data frozen at the disc
/// center, or at the first interior point with a preferred order when the
/// disc is built around a collision point), computes pairwise transitions at
/// deterministic overlap witnesses and checks every triple-overlap
/// composition is exact. Domain violations surface as failures with the
/// witness coordinates.
CocycleReport cocycle_check(const HarmonicShadow& shadow, const std::vector<Disc>& cover,
                            const Config& cfg = {});

struct GlueReport {
    bool pass = false;
    double max_mono_dev = 0.0;
    double max_jump_dev = 0.0;
    std::string detail;
};

/// Compares the Betti data of the preferred sample at lambda with that of its
/// conjugate-chart transport at 1/lambda under a shared level choice:
/// monodromy multisets must be complex conjugates and jumps must match.
/// Meaningful on |lambda| = 1 where the two charts carry the same filtration.
GlueReport glue_infinity(const HarmonicShadow& shadow, cplx lambda,
                         const Config& cfg = {});

/// CSV emitter for traced samples (header row included, slots 1-based).
void write_section_csv(std::ostream& os, const TraceResult& trace);

}  // namespace specshadow
