#pragma once

#include <vector>

#include "specshadow/config.hpp"
#include "specshadow/groupoid.hpp"

namespace specshadow {

/// One strictly increasing tuple of levels in (-1, 0] per puncture.
struct LevelChoice {
    std::vector<std::vector<double>> b;
};

/// One monodromy eigenvalue / growth-order pair.
struct BettiSlot {
    cplx mu{0.0, 0.0};
    double jump = 0.0;
};

/// Per-puncture slots sorted by jump ascending.
struct BettiShadow {
    std::vector<std::vector<BettiSlot>> punctures;
};

/// Picks levels b_1 < ... < b_r in (-1, 0] per puncture such that the values
/// b_j + Re(theta_j) stay pairwise distinct when every Re(theta_j) moves by
/// up to ball_radius. Deterministic: each b_j is the midpoint of the longest
/// feasible subinterval (candidates shorter than 1/(8 r^2) are discarded).
/// Throws InfeasibleBall naming the blocking pair if no candidate survives.
LevelChoice choose_levels(const std::vector<std::vector<cplx>>& thetas,
                          double ball_radius, const Config& cfg = {});

/// b_j + Re(theta_j) per slot.
std::vector<std::vector<double>> real_jumps(const LevelChoice& b,
                                            const std::vector<std::vector<cplx>>& thetas);

/// exp(-2 pi i theta / lambda); throws LambdaZero at lambda = 0. Invariant
/// under theta -> theta + k * lambda. The sign is a fixed convention of this
/// artifact; every consumer in the library uses the same one.
cplx monodromy_shadow(cplx theta, cplx lambda);

/// Pairs each slot's monodromy eigenvalue with its real jump and sorts by
/// jump. On a Chart::Conjugate shadow the eigenvalues are inverted
/// (exp(+2 pi i theta / lambda)): the chart identification reverses loop
/// orientation, so positively-oriented monodromy on that side is the inverse.
BettiShadow betti_shadow(const ResidueShadow& s, const LevelChoice& b,
                         const Config& cfg = {});

/// Transport to the conjugate-curve chart at mu = 1/lambda:
/// theta -> theta / lambda^2, which is the e-value of the conjugate spectrum
/// element (a, conj(alpha)) at mu. Lattice-compatible (theta + k*lambda maps
/// to theta' + k*mu) and involutive together with the chart flip.
/// The spectrum convention (a, alpha) -> (a, conj(alpha)) is the unique one
/// matching rank-1 flat-section growth exponents on both charts; the closed
/// form oracle lives in the test suite.
ResidueShadow conjugate_shadow(const ResidueShadow& s);

}  // namespace specshadow
