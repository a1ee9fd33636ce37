#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "specshadow/groupoid.hpp"
#include "specshadow/kms.hpp"
#include "specshadow/rng.hpp"

namespace testsupport {

using namespace specshadow;

/// The rank-2 spectrum {(0, 0), (0, 1)} at one puncture, the standard
/// wall-crossing example: collisions at the roots of lambda^2 - n*lambda + 1.
inline HarmonicShadow rank2_model() {
    HarmonicShadow shadow;
    shadow.rank = 2;
    Puncture p;
    p.label = "t1";
    p.spectrum.rank = 2;
    p.spectrum.points = {KmsPoint{0.0, {0.0, 0.0}}, KmsPoint{0.0, {1.0, 0.0}}};
    shadow.punctures.push_back(p);
    return shadow;
}

inline HarmonicShadow make_shadow(
    int rank,
    const std::vector<std::pair<std::string, std::vector<KmsPoint>>>& punctures) {
    HarmonicShadow shadow;
    shadow.rank = rank;
    for (const auto& [label, points] : punctures) {
        Puncture p;
        p.label = label;
        p.spectrum.rank = rank;
        p.spectrum.points = points;
        shadow.punctures.push_back(std::move(p));
    }
    return shadow;
}

inline ResidueShadow make_residue(
    cplx lambda,
    const std::vector<std::pair<std::string, std::vector<cplx>>>& punctures,
    long degree = 0) {
    ResidueShadow s;
    s.lambda = lambda;
    s.degree_offset = degree;
    for (const auto& [label, theta] : punctures) {
        s.punctures.push_back(PunctureShadow{label, theta});
    }
    return s;
}

inline KmsPoint random_kms(Rng& rng) {
    KmsPoint x;
    x.a = -rng.uniform(0.0, 0.999);
    x.alpha = rng.complex_in_box(2.0);
    return x;
}

inline ResidueShadow random_residue(Rng& rng, int rank, int n_punctures,
                                    double lambda_box = 1.5) {
    ResidueShadow s;
    s.lambda = rng.complex_in_box(lambda_box);
    for (int t = 0; t < n_punctures; ++t) {
        PunctureShadow p;
        p.label = "t" + std::to_string(t + 1);
        for (int i = 0; i < rank; ++i) p.theta.push_back(rng.complex_in_box(3.0));
        s.punctures.push_back(std::move(p));
    }
    return s;
}

inline GroupoidWord random_word(Rng& rng, const std::vector<std::string>& labels,
                                int rank, int length) {
    GroupoidWord w;
    for (int n = 0; n < length; ++n) {
        Factor f;
        f.gen.puncture = labels[static_cast<std::size_t>(
            rng.integer(0, static_cast<long>(labels.size()) - 1))];
        long kind = rng.integer(0, 2);
        if (kind == 0) {
            f.gen.kind = GenKind::H;
        } else if (kind == 1 && rank >= 2) {
            f.gen.kind = GenKind::T;
            f.gen.slot = static_cast<int>(rng.integer(1, rank - 1));
        } else {
            f.gen.kind = GenKind::U;
        }
        f.inverse = rng.uniform() < 0.5;
        w.push(f);
    }
    return w;
}

/// Greedy nearest matching of two complex multisets to tolerance eps.
inline bool multiset_close(std::vector<cplx> xs, std::vector<cplx> ys, double eps) {
    if (xs.size() != ys.size()) return false;
    for (const cplx& x : xs) {
        std::size_t best = ys.size();
        double best_d = eps;
        for (std::size_t k = 0; k < ys.size(); ++k) {
            double d = std::abs(x - ys[k]);
            if (d <= best_d) {
                best_d = d;
                best = k;
            }
        }
        if (best == ys.size()) return false;
        ys.erase(ys.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return true;
}

/// Greedy matching with a magnitude-relative tolerance, for multisets of
/// exponentials whose absolute size varies over many orders of magnitude.
inline bool multiset_close_rel(std::vector<cplx> xs, std::vector<cplx> ys, double eps) {
    if (xs.size() != ys.size()) return false;
    for (const cplx& x : xs) {
        std::size_t best = ys.size();
        double best_d = 0.0;
        for (std::size_t k = 0; k < ys.size(); ++k) {
            double scale = std::max({1.0, std::abs(x), std::abs(ys[k])});
            double d = std::abs(x - ys[k]) / scale;
            if (d <= eps && (best == ys.size() || d < best_d)) {
                best_d = d;
                best = k;
            }
        }
        if (best == ys.size()) return false;
        ys.erase(ys.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return true;
}

inline std::vector<std::string> puncture_labels(const ResidueShadow& s) {
    std::vector<std::string> out;
    for (const auto& p : s.punctures) out.push_back(p.label);
    return out;
}

}  // namespace testsupport
