#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "specshadow/config.hpp"
#include "specshadow/kms.hpp"

namespace specshadow {

/// Coefficients of the collision function f(lambda) = A/lambda + B + C*lambda
/// for a pair of spectrum elements; f(lambda) is an integer n exactly when
/// the two e-values differ by n*lambda.
struct CollisionCoeffs {
    cplx A{0.0, 0.0};
    double B = 0.0;
    cplx C{0.0, 0.0};

    cplx eval(cplx lambda) const { return A / lambda + B + C * lambda; }
};

/// A collision point with its witness: puncture, slot pair (0-based) and the
/// integer n with e_i - e_j = n * lambda there.
struct DeltaPoint {
    cplx lambda{0.0, 0.0};
    std::string puncture;
    int i = 0;
    int j = 0;
    long n = 0;
};

/// Polyline sample of one level-coincidence curve
/// { lambda : (a_i - a_j) + 2 Re(lambda * conj(alpha_i - alpha_j)) = m }.
struct WallCurve {
    std::string puncture;
    int i = 0;
    int j = 0;
    long m = 0;
    std::vector<cplx> points;
};

struct Disc {
    cplx center{0.0, 0.0};
    double radius = 0.0;

    bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

CollisionCoeffs collision_function(const KmsPoint& x, const KmsPoint& y);

/// All collision points with r_min <= |lambda| <= r_max over every puncture
/// and slot pair, each verified to |f(lambda) - n| <= cfg.eps_root and
/// deduplicated. Throws DegenerateFamily if a pair collides identically.
/// Result is sorted by (|lambda|, arg lambda, witness).
std::vector<DeltaPoint> delta_in_region(const HarmonicShadow& shadow,
                                        double r_min, double r_max,
                                        const Config& cfg = {});

/// Polyline samples of the level-coincidence lines inside the annulus. Each
/// line is parametrized exactly and sampled at the given point count per
/// visible chord segment.
std::vector<WallCurve> level_walls(const HarmonicShadow& shadow,
                                   double r_min, double r_max, int samples,
                                   const Config& cfg = {});

/// Open covering of the disc |lambda| <= r_max by: one disc at 0, one small
/// disc per reported collision point outside it, and filler discs avoiding
/// the collision points and 0. Every pairwise intersection of distinct discs
/// is disjoint from the reported points and from 0. Throws CoverFailure when
/// the requested resolution cannot separate the points.
std::vector<Disc> build_cover(const HarmonicShadow& shadow,
                              double r_min, double r_max,
                              const std::vector<DeltaPoint>& delta,
                              const Config& cfg = {});

/// CSV emitters (header row included; slot indices 1-based on the wire).
void write_delta_csv(std::ostream& os, const std::vector<DeltaPoint>& delta);
void write_walls_csv(std::ostream& os, const std::vector<WallCurve>& walls);
void write_cover_csv(std::ostream& os, const std::vector<Disc>& cover);

}  // namespace specshadow
