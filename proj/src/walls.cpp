#include "specshadow/walls.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "specshadow/errors.hpp"

namespace specshadow {

CollisionCoeffs collision_function(const KmsPoint& x, const KmsPoint& y) {
    CollisionCoeffs c;
    c.A = x.alpha - y.alpha;
    c.B = -(x.a - y.a);
    c.C = std::conj(c.A);
    return c;
}

namespace {

/// Both roots of C z^2 + b z + A = 0 with complex C, A and real b, using the
/// cancellation-free splitting of the quadratic formula.
std::pair<cplx, cplx> quadratic_roots(cplx C, double b, cplx A) {
    cplx disc = cplx(b * b, 0.0) - 4.0 * C * A;
    cplx sq = std::sqrt(disc);
    double s = (b * sq.real() >= 0.0) ? 1.0 : -1.0;
    cplx q = -0.5 * (b + s * sq);
    if (std::abs(q) > 0.0) {
        return {q / C, A / q};
    }
    return {(-b + sq) / (2.0 * C), (-b - sq) / (2.0 * C)};
}

void check_region(double r_min, double r_max) {
    if (!(r_min > 0.0) || !(r_max >= r_min)) {
        throw ConfigError("region: need 0 < r_min <= r_max");
    }
}

}  // namespace

std::vector<DeltaPoint> delta_in_region(const HarmonicShadow& shadow, double r_min,
                                        double r_max, const Config& cfg) {
    cfg.validate();
    check_region(r_min, r_max);
    const double slack = 1.0 + 1e-12;
    std::vector<DeltaPoint> out;
    for (std::size_t t = 0; t < shadow.punctures.size(); ++t) {
        const Puncture& p = shadow.punctures[t];
        const int r = static_cast<int>(p.spectrum.points.size());
        for (int i = 0; i < r; ++i) {
            for (int j = i + 1; j < r; ++j) {
                CollisionCoeffs f = collision_function(p.spectrum.points[i],
                                                       p.spectrum.points[j]);
                if (std::abs(f.A) <= cfg.eps_eq) {
                    if (std::abs(f.B - std::round(f.B)) <= cfg.eps_eq) {
                        std::ostringstream msg;
                        msg << "spectrum elements " << i + 1 << " and " << j + 1
                            << " at puncture \"" << p.label
                            << "\" collide at every parameter value";
                        throw DegenerateFamily(msg.str());
                    }
                    continue;
                }
                long n_max = static_cast<long>(
                    std::ceil(std::abs(f.A) / r_min + std::abs(f.B) +
                              std::abs(f.C) * r_max));
                for (long n = -n_max; n <= n_max; ++n) {
                    auto [z1, z2] = quadratic_roots(f.C, f.B - static_cast<double>(n), f.A);
                    std::vector<cplx> roots{z1};
                    if (std::abs(z2 - z1) > 1e-12 * std::max(1.0, std::abs(z1))) {
                        roots.push_back(z2);
                    }
                    for (cplx z : roots) {
                        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
                        double mag = std::abs(z);
                        if (mag * slack < r_min || mag > r_max * slack) continue;
                        if (std::abs(f.eval(z) - static_cast<double>(n)) > cfg.eps_root) {
                            continue;
                        }
                        out.push_back({z, p.label, i, j, n});
                    }
                }
            }
        }
    }
    std::vector<int> puncture_of(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        puncture_of[k] = shadow.puncture_index(out[k].puncture);
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        double mx = std::abs(out[x].lambda);
        double my = std::abs(out[y].lambda);
        if (mx != my) return mx < my;
        double ax = std::arg(out[x].lambda);
        double ay = std::arg(out[y].lambda);
        if (ax != ay) return ax < ay;
        if (puncture_of[x] != puncture_of[y]) return puncture_of[x] < puncture_of[y];
        if (out[x].i != out[y].i) return out[x].i < out[y].i;
        if (out[x].j != out[y].j) return out[x].j < out[y].j;
        return out[x].n < out[y].n;
    });
    std::vector<DeltaPoint> sorted;
    for (std::size_t k : order) {
        bool duplicate = false;
        for (const DeltaPoint& seen : sorted) {
            if (seen.puncture == out[k].puncture && seen.i == out[k].i &&
                seen.j == out[k].j && seen.n == out[k].n &&
                std::abs(seen.lambda - out[k].lambda) <= 1e-9) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) sorted.push_back(out[k]);
    }
    return sorted;
}

std::vector<WallCurve> level_walls(const HarmonicShadow& shadow, double r_min,
                                   double r_max, int samples, const Config& cfg) {
    cfg.validate();
    check_region(r_min, r_max);
    if (samples < 2) {
        throw ConfigError("level_walls: need at least 2 samples per curve");
    }
    std::vector<WallCurve> out;
    for (const Puncture& p : shadow.punctures) {
        const int r = static_cast<int>(p.spectrum.points.size());
        for (int i = 0; i < r; ++i) {
            for (int j = i + 1; j < r; ++j) {
                const KmsPoint& x = p.spectrum.points[i];
                const KmsPoint& y = p.spectrum.points[j];
                double da = x.a - y.a;
                cplx d = x.alpha - y.alpha;
                if (std::abs(d) <= cfg.eps_eq) continue;
                // p_i - p_j = da + 2 Re(conj(2d) * lambda) / 2; the wall for
                // integer m is the line Re(conj(N) * lambda) = m - da with
                // N = 2d.
                cplx N = 2.0 * d;
                double span = std::abs(N) * r_max;
                long m_lo = static_cast<long>(std::ceil(da - span - 1e-12));
                long m_hi = static_cast<long>(std::floor(da + span + 1e-12));
                for (long m = m_lo; m <= m_hi; ++m) {
                    double c = static_cast<double>(m) - da;
                    double dist0 = std::abs(c) / std::abs(N);
                    if (dist0 > r_max) continue;
                    cplx p0 = c * N / std::norm(N);
                    cplx tangent = cplx(0.0, 1.0) * N / std::abs(N);
                    double s_max = std::sqrt(std::max(0.0, r_max * r_max - dist0 * dist0));
                    std::vector<std::pair<double, double>> segments;
                    if (dist0 < r_min) {
                        double s_in =
                            std::sqrt(std::max(0.0, r_min * r_min - dist0 * dist0));
                        if (s_max > s_in) {
                            segments.push_back({-s_max, -s_in});
                            segments.push_back({s_in, s_max});
                        }
                    } else if (s_max > 0.0) {
                        segments.push_back({-s_max, s_max});
                    }
                    for (auto [lo, hi] : segments) {
                        WallCurve curve{p.label, i, j, m, {}};
                        for (int k = 0; k < samples; ++k) {
                            double s = lo + (hi - lo) * k / (samples - 1);
                            curve.points.push_back(p0 + s * tangent);
                        }
                        out.push_back(std::move(curve));
                    }
                }
            }
        }
    }
    return out;
}

namespace {

struct CoverContext {
    std::vector<cplx> excluded;  ///< 0 first, then distinct collision points
    std::vector<Disc> big;       ///< the disc at 0, then the special discs
    std::vector<Disc> fillers;
    double size_floor = 0.0;
    double r_max = 0.0;
};

double dist_to_excluded(const CoverContext& ctx, cplx z) {
    double best = std::abs(z - ctx.excluded[0]);
    for (std::size_t k = 1; k < ctx.excluded.size(); ++k) {
        best = std::min(best, std::abs(z - ctx.excluded[k]));
    }
    return best;
}

bool cell_inside_disc(cplx c, double half, const Disc& d) {
    for (int sx = -1; sx <= 1; sx += 2) {
        for (int sy = -1; sy <= 1; sy += 2) {
            cplx corner = c + cplx(sx * half, sy * half);
            if (std::abs(corner - d.center) > d.radius) return false;
        }
    }
    return true;
}

/// Covers the square cell of the given half-width centered at c, refining
/// near excluded points. Every filler keeps radius <= half the distance to
/// the excluded set, so no filler ever contains an excluded point.
void cover_cell(CoverContext& ctx, cplx c, double half) {
    double corner_margin = half * std::sqrt(2.0);
    if (std::abs(c) - corner_margin > ctx.r_max) return;  // cell outside the disc
    double radius = std::min(0.5 * dist_to_excluded(ctx, c), 4.0 * half);
    if (radius > corner_margin) {
        ctx.fillers.push_back({c, radius});
        return;
    }
    for (const Disc& d : ctx.big) {
        if (cell_inside_disc(c, half, d)) return;
    }
    if (half < ctx.size_floor) {
        std::ostringstream msg;
        msg << "cover: cannot separate the excluded points near (" << c.real() << ", "
            << c.imag() << ")";
        throw CoverFailure(msg.str());
    }
    double q = half / 2.0;
    cover_cell(ctx, c + cplx(-q, -q), q);
    cover_cell(ctx, c + cplx(q, -q), q);
    cover_cell(ctx, c + cplx(-q, q), q);
    cover_cell(ctx, c + cplx(q, q), q);
}

}  // namespace

std::vector<Disc> build_cover(const HarmonicShadow& shadow, double r_min, double r_max,
                              const std::vector<DeltaPoint>& delta, const Config& cfg) {
    (void)shadow;
    cfg.validate();
    check_region(r_min, r_max);

    CoverContext ctx;
    ctx.r_max = r_max;
    ctx.excluded.push_back({0.0, 0.0});
    for (const DeltaPoint& d : delta) {
        bool seen = false;
        for (std::size_t k = 1; k < ctx.excluded.size(); ++k) {
            if (std::abs(ctx.excluded[k] - d.lambda) <= 1e-12) {
                seen = true;
                break;
            }
        }
        if (!seen) ctx.excluded.push_back(d.lambda);
    }

    // Disc at 0: the radius sits in the widest gap of the collision-point
    // magnitudes so that nothing excluded lies near its boundary.
    std::vector<double> mags;
    for (std::size_t k = 1; k < ctx.excluded.size(); ++k) {
        mags.push_back(std::abs(ctx.excluded[k]));
    }
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
               mags.end());
    double radius0 = 0.5 * r_max;
    double clearance0 = 0.5 * r_max;
    if (!mags.empty()) {
        radius0 = 0.5 * mags.front();
        clearance0 = 0.5 * mags.front();
        for (std::size_t k = 0; k + 1 < mags.size(); ++k) {
            double mid = 0.5 * (mags[k] + mags[k + 1]);
            double clear = 0.5 * (mags[k + 1] - mags[k]);
            if (mid <= 0.5 * r_max && clear > clearance0) {
                radius0 = mid;
                clearance0 = clear;
            }
        }
        if (mags.back() < 0.5 * r_max && 0.5 * r_max - mags.back() > clearance0) {
            radius0 = 0.5 * (mags.back() + 0.5 * r_max);
            clearance0 = 0.5 * r_max - mags.back();
        }
        if (radius0 <= 0.0) {
            throw CoverFailure("cover: a collision point sits at 0");
        }
    }
    ctx.big.push_back({{0.0, 0.0}, radius0});

    // One special disc per excluded point outside the disc at 0, small enough
    // to contain no other excluded point.
    double min_sep = r_max;
    for (std::size_t x = 0; x < ctx.excluded.size(); ++x) {
        for (std::size_t y = x + 1; y < ctx.excluded.size(); ++y) {
            min_sep = std::min(min_sep, std::abs(ctx.excluded[x] - ctx.excluded[y]));
        }
    }
    for (std::size_t k = 1; k < ctx.excluded.size(); ++k) {
        cplx center = ctx.excluded[k];
        if (std::abs(center) <= radius0) continue;
        double nearest = std::abs(center);  // distance to 0
        for (std::size_t x = 1; x < ctx.excluded.size(); ++x) {
            if (x == k) continue;
            nearest = std::min(nearest, std::abs(center - ctx.excluded[x]));
        }
        ctx.big.push_back({center, 0.5 * nearest});
    }

    ctx.size_floor = std::min(min_sep, clearance0) / 16.0;
    if (!(ctx.size_floor > 0.0)) {
        throw CoverFailure("cover: excluded points are not separated");
    }

    // Quadtree fillers over the bounding square.
    int cells = std::max(4, cfg.grid_resolution);
    double h = 2.0 * r_max / cells;
    for (int gy = 0; gy < cells; ++gy) {
        for (int gx = 0; gx < cells; ++gx) {
            cplx c(-r_max + (gx + 0.5) * h, -r_max + (gy + 0.5) * h);
            cover_cell(ctx, c, 0.5 * h);
        }
    }

    std::vector<Disc> cover = ctx.big;
    cover.insert(cover.end(), ctx.fillers.begin(), ctx.fillers.end());

    // No excluded point may lie in two discs; by construction only the disc
    // at 0 or the point's own special disc may contain one.
    for (cplx e : ctx.excluded) {
        int owners = 0;
        for (const Disc& d : cover) {
            if (d.contains(e)) ++owners;
        }
        if (owners > 1) {
            std::ostringstream msg;
            msg << "cover: excluded point (" << e.real() << ", " << e.imag()
                << ") lies in " << owners << " discs";
            throw CoverFailure(msg.str());
        }
    }
    return cover;
}

void write_delta_csv(std::ostream& os, const std::vector<DeltaPoint>& delta) {
    os << "re,im,puncture,i,j,n\n";
    os << std::setprecision(12);
    for (const DeltaPoint& d : delta) {
        os << d.lambda.real() << ',' << d.lambda.imag() << ',' << d.puncture << ','
           << d.i + 1 << ',' << d.j + 1 << ',' << d.n << '\n';
    }
}

void write_walls_csv(std::ostream& os, const std::vector<WallCurve>& walls) {
    os << "curve_id,re,im,puncture,i,j,m\n";
    os << std::setprecision(12);
    for (std::size_t id = 0; id < walls.size(); ++id) {
        const WallCurve& w = walls[id];
        for (cplx z : w.points) {
            os << id << ',' << z.real() << ',' << z.imag() << ',' << w.puncture << ','
               << w.i + 1 << ',' << w.j + 1 << ',' << w.m << '\n';
        }
    }
}

void write_cover_csv(std::ostream& os, const std::vector<Disc>& cover) {
    os << "center_re,center_im,radius\n";
    os << std::setprecision(12);
    for (const Disc& d : cover) {
        os << d.center.real() << ',' << d.center.imag() << ',' << d.radius << '\n';
    }
}

}  // namespace specshadow
