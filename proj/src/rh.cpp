#include "specshadow/rh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specshadow/errors.hpp"

namespace specshadow {

namespace {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Removes [lo, hi] from every interval in the list.
std::vector<Interval> subtract(const std::vector<Interval>& list, double lo, double hi) {
    std::vector<Interval> out;
    for (const Interval& iv : list) {
        if (hi <= iv.lo || lo >= iv.hi) {
            out.push_back(iv);
            continue;
        }
        if (lo > iv.lo) out.push_back({iv.lo, std::min(lo, iv.hi)});
        if (hi < iv.hi) out.push_back({std::max(hi, iv.lo), iv.hi});
    }
    return out;
}

}  // namespace

LevelChoice choose_levels(const std::vector<std::vector<cplx>>& thetas,
                          double ball_radius, const Config& cfg) {
    cfg.validate();
    if (!(ball_radius >= 0.0)) {
        throw ConfigError("choose_levels: ball_radius must be non-negative");
    }
    LevelChoice choice;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        const std::vector<cplx>& theta = thetas[t];
        const int r = static_cast<int>(theta.size());
        if (r == 0) {
            throw SchemaError("choose_levels: empty residue tuple");
        }
        const double min_length = 1.0 / (8.0 * r * r);
        std::vector<double> b;
        for (int j = 0; j < r; ++j) {
            double prev = b.empty() ? -1.0 : b.back();
            std::vector<Interval> feasible{{prev, 0.0}};
            for (int j2 = 0; j2 < j; ++j2) {
                double c = b[j2] + std::real(theta[j2]) - std::real(theta[j]);
                feasible = subtract(feasible, c - 2.0 * ball_radius, c + 2.0 * ball_radius);
            }
            const Interval* best = nullptr;
            for (const Interval& iv : feasible) {
                if (iv.hi - iv.lo < min_length) continue;
                if (!best || iv.hi - iv.lo > best->hi - best->lo) best = &iv;
            }
            if (!best) {
                std::ostringstream msg;
                msg << "choose_levels: no feasible level for slot " << j + 1
                    << " of puncture " << t + 1 << " at ball radius " << ball_radius;
                throw InfeasibleBall(msg.str());
            }
            b.push_back(0.5 * (best->lo + best->hi));
        }
        choice.b.push_back(std::move(b));
    }
    return choice;
}

std::vector<std::vector<double>> real_jumps(const LevelChoice& b,
                                            const std::vector<std::vector<cplx>>& thetas) {
    if (b.b.size() != thetas.size()) {
        throw SchemaError("real_jumps: level choice and residues disagree on punctures");
    }
    std::vector<std::vector<double>> out;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        if (b.b[t].size() != thetas[t].size()) {
            throw SchemaError("real_jumps: level choice and residues disagree on rank");
        }
        std::vector<double> row;
        for (std::size_t j = 0; j < thetas[t].size(); ++j) {
            row.push_back(b.b[t][j] + std::real(thetas[t][j]));
        }
        out.push_back(std::move(row));
    }
    return out;
}

cplx monodromy_shadow(cplx theta, cplx lambda) {
    if (lambda == cplx(0.0, 0.0)) {
        throw LambdaZero("monodromy shadow needs lambda != 0");
    }
    const double two_pi = 2.0 * M_PI;
    return std::exp(cplx(0.0, -two_pi) * (theta / lambda));
}

BettiShadow betti_shadow(const ResidueShadow& s, const LevelChoice& b, const Config& cfg) {
    cfg.validate();
    if (b.b.size() != s.punctures.size()) {
        throw SchemaError("betti_shadow: level choice and shadow disagree on punctures");
    }
    if (s.lambda == cplx(0.0, 0.0)) {
        throw LambdaZero("betti_shadow needs lambda != 0");
    }
    const double two_pi = 2.0 * M_PI;
    BettiShadow out;
    for (std::size_t t = 0; t < s.punctures.size(); ++t) {
        const std::vector<cplx>& theta = s.punctures[t].theta;
        if (b.b[t].size() != theta.size()) {
            throw SchemaError("betti_shadow: level choice and shadow disagree on rank");
        }
        std::vector<BettiSlot> slots;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            BettiSlot slot;
            // The chart identification reverses loop orientation, so the
            // conjugate chart reads the inverse eigenvalue.
            double sign = (s.chart == Chart::Conjugate) ? 1.0 : -1.0;
            slot.mu = std::exp(cplx(0.0, sign * two_pi) * (theta[j] / s.lambda));
            slot.jump = b.b[t][j] + std::real(theta[j]);
            slots.push_back(slot);
        }
        std::sort(slots.begin(), slots.end(), [](const BettiSlot& x, const BettiSlot& y) {
            if (x.jump != y.jump) return x.jump < y.jump;
            if (x.mu.real() != y.mu.real()) return x.mu.real() < y.mu.real();
            return x.mu.imag() < y.mu.imag();
        });
        out.punctures.push_back(std::move(slots));
    }
    return out;
}

ResidueShadow conjugate_shadow(const ResidueShadow& s) {
    if (s.lambda == cplx(0.0, 0.0)) {
        throw LambdaZero("conjugate transport needs lambda != 0");
    }
    ResidueShadow out = s;
    out.lambda = 1.0 / s.lambda;
    out.chart = (s.chart == Chart::Standard) ? Chart::Conjugate : Chart::Standard;
    for (PunctureShadow& p : out.punctures) {
        for (cplx& z : p.theta) z /= s.lambda * s.lambda;
    }
    return out;
}

}  // namespace specshadow
