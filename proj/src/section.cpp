#include "specshadow/section.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "specshadow/errors.hpp"
#include "specshadow/rh.hpp"

namespace specshadow {

SectionSample local_order(const HarmonicShadow& shadow, cplx lambda, const Config& cfg) {
    cfg.validate();
    SectionSample sample;
    sample.lambda = lambda;
    for (const Puncture& p : shadow.punctures) {
        SectionPuncture sp;
        sp.label = p.label;
        for (std::size_t idx = 0; idx < p.spectrum.points.size(); ++idx) {
            FlowValue v = flow(p.spectrum.points[idx], lambda);
            int k = window_shift(v.p, cfg.window_anchor);
            SectionSlot slot;
            slot.kms_index = static_cast<int>(idx);
            slot.rep_shift = k;
            slot.p = v.p + k;
            slot.e = v.e - static_cast<double>(k) * lambda;
            sp.slots.push_back(slot);
        }
        std::sort(sp.slots.begin(), sp.slots.end(),
                  [](const SectionSlot& x, const SectionSlot& y) {
                      if (x.p != y.p) return x.p < y.p;
                      if (x.e.real() != y.e.real()) return x.e.real() < y.e.real();
                      if (x.e.imag() != y.e.imag()) return x.e.imag() < y.e.imag();
                      return x.kms_index < y.kms_index;
                  });
        for (std::size_t s = 0; s + 1 < sp.slots.size(); ++s) {
            const SectionSlot& x = sp.slots[s];
            const SectionSlot& y = sp.slots[s + 1];
            if (std::abs(x.p - y.p) <= cfg.eps_eq && std::abs(x.e - y.e) <= cfg.eps_eq) {
                std::ostringstream msg;
                msg << "no preferred order at lambda = (" << lambda.real() << ", "
                    << lambda.imag() << "): spectrum elements " << x.kms_index + 1
                    << " and " << y.kms_index + 1 << " of puncture \"" << p.label
                    << "\" tie in level and residue";
                throw OrderingAmbiguous(msg.str());
            }
        }
        sample.punctures.push_back(std::move(sp));
    }
    return sample;
}

SectionSample evaluate_section(const HarmonicShadow& shadow,
                               const SectionSample& anchored, cplx lambda) {
    SectionSample sample;
    sample.lambda = lambda;
    for (const SectionPuncture& ap : anchored.punctures) {
        int t = shadow.puncture_index(ap.label);
        if (t < 0) {
            throw SchemaError("shadow lacks puncture \"" + ap.label + "\"");
        }
        const Puncture& p = shadow.punctures[t];
        SectionPuncture sp;
        sp.label = ap.label;
        for (const SectionSlot& as : ap.slots) {
            if (as.kms_index < 0 ||
                as.kms_index >= static_cast<int>(p.spectrum.points.size())) {
                throw SchemaError("section slot references a missing spectrum element");
            }
            FlowValue v = flow(p.spectrum.points[as.kms_index], lambda);
            SectionSlot slot;
            slot.kms_index = as.kms_index;
            slot.rep_shift = as.rep_shift;
            slot.p = v.p + static_cast<double>(as.rep_shift);
            slot.e = v.e - static_cast<double>(as.rep_shift) * lambda;
            sp.slots.push_back(slot);
        }
        sample.punctures.push_back(std::move(sp));
    }
    return sample;
}

ResidueShadow to_residue_shadow(const SectionSample& sample) {
    ResidueShadow s;
    s.lambda = sample.lambda;
    long total_shift = 0;
    for (const SectionPuncture& sp : sample.punctures) {
        PunctureShadow p;
        p.label = sp.label;
        for (const SectionSlot& slot : sp.slots) {
            p.theta.push_back(slot.e);
            total_shift += slot.rep_shift;
        }
        s.punctures.push_back(std::move(p));
    }
    // Applying a transition of degree d moves the offset by +d, and the
    // transition between two samples has degree (their shift totals' difference),
    // so the accumulated shift itself is the consistent offset.
    s.degree_offset = total_shift;
    return s;
}

Transition transition(const SectionSample& s1, const SectionSample& s2,
                      const Config& cfg) {
    cfg.validate();
    if (s1.punctures.size() != s2.punctures.size()) {
        throw SchemaError("transition: samples disagree on punctures");
    }
    std::vector<std::string> labels;
    int rank = -1;
    for (std::size_t t = 0; t < s1.punctures.size(); ++t) {
        if (s1.punctures[t].label != s2.punctures[t].label) {
            throw SchemaError("transition: samples disagree on puncture order");
        }
        int r = static_cast<int>(s1.punctures[t].slots.size());
        if (static_cast<int>(s2.punctures[t].slots.size()) != r ||
            (rank >= 0 && r != rank)) {
            throw SchemaError("transition: samples disagree on rank");
        }
        rank = r;
        labels.push_back(s1.punctures[t].label);
    }
    NormalForm nf = NormalForm::identity(rank, labels);
    long total_m = 0;
    for (std::size_t t = 0; t < s1.punctures.size(); ++t) {
        const std::vector<SectionSlot>& from = s1.punctures[t].slots;
        const std::vector<SectionSlot>& to = s2.punctures[t].slots;
        std::vector<int> pos2(rank, -1);
        for (int s = 0; s < rank; ++s) {
            int idx = to[s].kms_index;
            if (idx < 0 || idx >= rank || pos2[idx] >= 0) {
                throw SchemaError("transition: sample slots do not enumerate the spectrum");
            }
            pos2[idx] = s;
        }
        PunctureAction& act = nf.action(labels[t]);
        for (int s = 0; s < rank; ++s) {
            int idx = from[s].kms_index;
            if (idx < 0 || idx >= rank || pos2[idx] < 0) {
                throw SchemaError("transition: sample slots do not enumerate the spectrum");
            }
            act.sigma[s] = pos2[idx];
            act.m[s] = from[s].rep_shift - to[pos2[idx]].rep_shift;
            total_m += act.m[s];
        }
        for (int u = 0; u < rank; ++u) {
            for (int v = u + 1; v < rank; ++v) {
                if (act.sigma[u] > act.sigma[v]) {
                    nf.add_constraint(labels[t], {u, v, act.m[v] - act.m[u]});
                }
            }
        }
    }
    nf.set_degree(-total_m);
    ResidueShadow r1 = to_residue_shadow(s1);
    ResidueShadow r2 = to_residue_shadow(s2);
    if (!nf.in_domain(r1, cfg) || !nf.inverse().in_domain(r2, cfg)) {
        std::ostringstream msg;
        msg << "transition undefined between lambda = (" << s1.lambda.real() << ", "
            << s1.lambda.imag() << ") and (" << s2.lambda.real() << ", "
            << s2.lambda.imag() << "): an endpoint sits on a collision";
        throw DomainViolation(msg.str());
    }
    Transition out;
    out.word = std::move(nf);
    return out;
}

namespace {

double point_segment_distance(cplx p, cplx a, cplx b) {
    cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

}  // namespace

TraceResult trace_path(const HarmonicShadow& shadow, const std::vector<cplx>& path,
                       const Config& cfg, double eps_path) {
    cfg.validate();
    if (path.empty()) {
        throw SchemaError("trace_path: empty path");
    }
    if (!(eps_path > 0.0)) {
        throw ConfigError("trace_path: eps_path must be positive");
    }

    double min_origin = std::abs(path.front());
    double max_mag = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        max_mag = std::max(max_mag, std::abs(path[k]));
        if (k + 1 < path.size()) {
            min_origin = std::min(min_origin,
                                  point_segment_distance({0.0, 0.0}, path[k], path[k + 1]));
        } else {
            min_origin = std::min(min_origin, std::abs(path[k]));
        }
    }
    bool has_colliding_pair = false;
    for (const Puncture& p : shadow.punctures) {
        const int r = static_cast<int>(p.spectrum.points.size());
        for (int i = 0; i < r && !has_colliding_pair; ++i) {
            for (int j = i + 1; j < r; ++j) {
                CollisionCoeffs f =
                    collision_function(p.spectrum.points[i], p.spectrum.points[j]);
                if (std::abs(f.A) > cfg.eps_eq) {
                    has_colliding_pair = true;
                    break;
                }
            }
        }
    }
    if (has_colliding_pair) {
        // Collision points accumulate at 0: a path this close to 0 cannot
        // clear them all, and the margin keeps every un-enumerated point
        // below r_lo farther than eps_path from the path.
        if (min_origin < 2.0 * eps_path) {
            throw PathThroughWall(
                "path passes within 2*eps_path of the accumulation at 0", {0.0, 0.0});
        }
        double r_lo = min_origin - eps_path;
        double r_hi = max_mag + 2.0 * eps_path;
        std::vector<DeltaPoint> delta = delta_in_region(shadow, r_lo, r_hi, cfg);
        for (const DeltaPoint& d : delta) {
            for (std::size_t k = 0; k + 1 < path.size(); ++k) {
                if (point_segment_distance(d.lambda, path[k], path[k + 1]) <= eps_path) {
                    std::ostringstream msg;
                    msg << "path passes within " << eps_path << " of the collision at ("
                        << d.lambda.real() << ", " << d.lambda.imag() << ")";
                    throw PathThroughWall(msg.str(), d.lambda);
                }
            }
        }
    }

    TraceResult result;
    result.samples.push_back(local_order(shadow, path.front(), cfg));
    for (std::size_t k = 1; k < path.size(); ++k) {
        // Links the last recorded sample to the target, bisecting on domain
        // violations up to a fixed depth.
        struct Step {
            SectionSample target;
            int depth;
        };
        std::vector<Step> stack{{local_order(shadow, path[k], cfg), 0}};
        while (!stack.empty()) {
            Step step = std::move(stack.back());
            stack.pop_back();
            const SectionSample& prev = result.samples.back();
            try {
                Transition tr = transition(prev, step.target, cfg);
                tr.from_sample = static_cast<int>(result.samples.size()) - 1;
                tr.to_sample = static_cast<int>(result.samples.size());
                result.samples.push_back(step.target);
                result.transitions.push_back(std::move(tr));
            } catch (const DomainViolation&) {
                if (step.depth >= 20) throw;
                cplx mid = 0.5 * (prev.lambda + step.target.lambda);
                SectionSample mid_sample = local_order(shadow, mid, cfg);
                stack.push_back({std::move(step.target), step.depth + 1});
                stack.push_back({std::move(mid_sample), step.depth + 1});
            }
        }
    }
    if (std::abs(path.front() - path.back()) <= cfg.eps_eq &&
        !result.transitions.empty()) {
        NormalForm hol = result.transitions.front().word;
        for (std::size_t k = 1; k < result.transitions.size(); ++k) {
            hol = hol.then(result.transitions[k].word);
        }
        result.holonomy = std::move(hol);
    }
    return result;
}

namespace {

/// Trivialization of a disc: based at the center when the preferred order
/// exists there, else at the first interior point clear of the collision the
/// disc was built around. The base only fixes the representative shifts, so
/// any order-defined interior point gives the same transition words.
SectionSample disc_sample(const HarmonicShadow& shadow, const Disc& d, const Config& cfg) {
    const std::vector<cplx> offsets = {{0.0, 0.0},
                                       {0.5 * d.radius, 0.0},
                                       {0.0, 0.5 * d.radius},
                                       {-0.5 * d.radius, 0.0},
                                       {0.0, -0.5 * d.radius}};
    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
        try {
            return local_order(shadow, d.center + offsets[k], cfg);
        } catch (const OrderingAmbiguous&) {
        }
    }
    return local_order(shadow, d.center + offsets.back(), cfg);
}

}  // namespace

CocycleReport cocycle_check(const HarmonicShadow& shadow, const std::vector<Disc>& cover,
                            const Config& cfg) {
    cfg.validate();
    CocycleReport report;
    report.discs = static_cast<int>(cover.size());
    std::vector<SectionSample> sections;
    sections.reserve(cover.size());
    for (const Disc& d : cover) {
        sections.push_back(disc_sample(shadow, d, cfg));
    }

    auto witness_point = [&](int i, int j) -> cplx {
        cplx ci = cover[i].center;
        cplx cj = cover[j].center;
        double d = std::abs(cj - ci);
        std::vector<cplx> candidates;
        if (d > 0.0) {
            cplx dir = (cj - ci) / d;
            candidates.push_back(ci + dir * (0.5 * (d - cover[j].radius + cover[i].radius)));
        }
        candidates.push_back(0.5 * (ci + cj));
        candidates.push_back(cj);
        candidates.push_back(ci);
        for (cplx w : candidates) {
            if (cover[i].contains(w) && cover[j].contains(w)) return w;
        }
        return 0.5 * (ci + cj);
    };

    std::map<std::pair<int, int>, NormalForm> words;
    std::vector<std::vector<int>> neighbors(cover.size());
    const int n = static_cast<int>(cover.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(cover[i].center - cover[j].center) >=
                cover[i].radius + cover[j].radius) {
                continue;
            }
            ++report.overlaps;
            neighbors[i].push_back(j);
            cplx w = witness_point(i, j);
            try {
                Transition tr = transition(evaluate_section(shadow, sections[i], w),
                                           evaluate_section(shadow, sections[j], w), cfg);
                words.emplace(std::make_pair(i, j), std::move(tr.word));
            } catch (const DomainViolation& e) {
                std::ostringstream msg;
                msg << "overlap (" << i << ", " << j << ") at witness (" << w.real()
                    << ", " << w.imag() << "): " << e.what();
                report.failures.push_back(msg.str());
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (std::size_t x = 0; x < neighbors[i].size(); ++x) {
            for (std::size_t y = x + 1; y < neighbors[i].size(); ++y) {
                int j = neighbors[i][x];
                int k = neighbors[i][y];
                if (j > k) std::swap(j, k);
                if (std::abs(cover[j].center - cover[k].center) >=
                    cover[j].radius + cover[k].radius) {
                    continue;
                }
                auto ij = words.find({i, j});
                auto jk = words.find({j, k});
                auto ik = words.find({i, k});
                if (ij == words.end() || jk == words.end() || ik == words.end()) {
                    continue;  // a pair already failed and was reported
                }
                ++report.triples;
                if (!ij->second.then(jk->second).same_action(ik->second)) {
                    std::ostringstream msg;
                    msg << "cocycle breaks on discs (" << i << ", " << j << ", " << k
                        << ")";
                    report.failures.push_back(msg.str());
                }
            }
        }
    }
    report.pass = report.failures.empty();
    return report;
}

GlueReport glue_infinity(const HarmonicShadow& shadow, cplx lambda, const Config& cfg) {
    cfg.validate();
    SectionSample sample = local_order(shadow, lambda, cfg);
    ResidueShadow rs = to_residue_shadow(sample);
    std::vector<std::vector<cplx>> thetas;
    for (const PunctureShadow& p : rs.punctures) thetas.push_back(p.theta);
    LevelChoice b = choose_levels(thetas, 0.0, cfg);
    BettiShadow here = betti_shadow(rs, b, cfg);
    BettiShadow there = betti_shadow(conjugate_shadow(rs), b, cfg);

    GlueReport report;
    for (std::size_t t = 0; t < here.punctures.size(); ++t) {
        const std::vector<BettiSlot>& hs = here.punctures[t];
        const std::vector<BettiSlot>& ts = there.punctures[t];
        for (std::size_t j = 0; j < hs.size(); ++j) {
            report.max_jump_dev =
                std::max(report.max_jump_dev, std::abs(hs[j].jump - ts[j].jump));
        }
        // Greedy nearest matching of the conjugated monodromy multiset.
        std::vector<bool> used(ts.size(), false);
        for (const BettiSlot& slot : hs) {
            double best = -1.0;
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < ts.size(); ++j) {
                if (used[j]) continue;
                double dev = std::abs(std::conj(slot.mu) - ts[j].mu);
                if (best < 0.0 || dev < best) {
                    best = dev;
                    best_j = j;
                }
            }
            used[best_j] = true;
            report.max_mono_dev = std::max(report.max_mono_dev, best);
        }
    }
    report.pass = report.max_mono_dev <= 1e-9 && report.max_jump_dev <= 1e-9;
    std::ostringstream detail;
    detail << "monodromy multiset deviation " << report.max_mono_dev
           << ", growth order deviation " << report.max_jump_dev << " at |lambda| = "
           << std::abs(lambda);
    report.detail = detail.str();
    return report;
}

void write_section_csv(std::ostream& os, const TraceResult& trace) {
    os << "sample_id,re_lambda,im_lambda,puncture,slot,kms_index,rep_shift,p,re_e,im_e\n";
    os << std::setprecision(12);
    for (std::size_t s = 0; s < trace.samples.size(); ++s) {
        const SectionSample& sample = trace.samples[s];
        for (const SectionPuncture& sp : sample.punctures) {
            for (std::size_t slot = 0; slot < sp.slots.size(); ++slot) {
                const SectionSlot& x = sp.slots[slot];
                os << s << ',' << sample.lambda.real() << ',' << sample.lambda.imag()
                   << ',' << sp.label << ',' << slot + 1 << ',' << x.kms_index << ','
                   << x.rep_shift << ',' << x.p << ',' << x.e.real() << ','
                   << x.e.imag() << '\n';
            }
        }
    }
}

}  // namespace specshadow
