#include "specshadow/suites.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <sstream>

#include "specshadow/betti.hpp"
#include "specshadow/errors.hpp"
#include "specshadow/groupoid.hpp"
#include "specshadow/kms.hpp"
#include "specshadow/rh.hpp"
#include "specshadow/rng.hpp"
#include "specshadow/section.hpp"
#include "specshadow/twistor.hpp"
#include "specshadow/walls.hpp"

namespace specshadow {

namespace {

/// Collects pass/fail assertions for one suite run.
struct Recorder {
    SuiteResult result;

    void check(bool ok, const std::string& label) {
        ++result.checks;
        if (!ok) result.failures.push_back(label);
    }

    template <typename Fn>
    void guarded(const std::string& label, Fn&& fn) {
        ++result.checks;
        try {
            if (!fn()) result.failures.push_back(label);
        } catch (const Error& e) {
            result.failures.push_back(label + ": " + e.what());
        }
    }
};

KmsPoint random_point(Rng& rng) {
    KmsPoint x;
    x.a = -rng.uniform(0.0, 0.999);
    x.alpha = rng.complex_in_box(1.0);
    return x;
}

HarmonicShadow random_shadow(Rng& rng, int rank, int n_punctures) {
    HarmonicShadow shadow;
    shadow.rank = rank;
    for (int t = 0; t < n_punctures; ++t) {
        Puncture p;
        p.label = "t" + std::to_string(t + 1);
        p.spectrum.rank = rank;
        for (int i = 0; i < rank; ++i) p.spectrum.points.push_back(random_point(rng));
        shadow.punctures.push_back(std::move(p));
    }
    return shadow;
}

ResidueShadow random_residue_shadow(Rng& rng, int rank, int n_punctures) {
    ResidueShadow s;
    s.lambda = rng.complex_in_annulus(0.5, 1.5);
    for (int t = 0; t < n_punctures; ++t) {
        PunctureShadow p;
        p.label = "t" + std::to_string(t + 1);
        for (int i = 0; i < rank; ++i) p.theta.push_back(rng.complex_in_box(2.0));
        s.punctures.push_back(std::move(p));
    }
    return s;
}

GroupoidWord random_word(Rng& rng, int rank, const std::vector<std::string>& labels,
                         int max_len) {
    GroupoidWord w;
    long len = rng.integer(0, max_len);
    for (long k = 0; k < len; ++k) {
        Factor f;
        long kind = rng.integer(0, rank >= 2 ? 2 : 1);
        f.gen.puncture = labels[static_cast<std::size_t>(
            rng.integer(0, static_cast<long>(labels.size()) - 1))];
        if (kind == 2) {
            f.gen.kind = GenKind::T;
            f.gen.slot = static_cast<int>(rng.integer(1, rank - 1));
        } else {
            f.gen.kind = kind == 0 ? GenKind::H : GenKind::U;
        }
        f.inverse = rng.integer(0, 1) == 1;
        w.push(f);
    }
    return w;
}

SuiteResult suite_flow(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x666c6f77ULL);
    for (int it = 0; it < 200; ++it) {
        KmsPoint x = random_point(rng);
        cplx lambda = rng.complex_in_box(2.0);
        int k = static_cast<int>(rng.integer(-3, 3));

        FlowValue base = flow(x, lambda);
        FlowValue shifted = flow(lattice_shift(x, k), lambda);
        rec.check(std::abs(shifted.p - (base.p + k)) <= 1e-9 &&
                      std::abs(shifted.e - (base.e - static_cast<double>(k) * lambda)) <=
                          1e-9,
                  "lattice equivariance");

        FlowValue origin = flow(x, {0.0, 0.0});
        rec.check(origin.p == x.a && origin.e == x.alpha, "flow fixes lambda = 0");

        int w = window_shift(base.p, cfg.window_anchor);
        double moved = base.p + w;
        rec.check(moved > cfg.window_anchor - 1.0 && moved <= cfg.window_anchor,
                  "window shift lands in the window");
    }
    return std::move(rec.result);
}

SuiteResult suite_groupoid(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x67727570ULL);
    for (int it = 0; it < 60; ++it) {
        int rank = static_cast<int>(rng.integer(1, 4));
        int n_punct = static_cast<int>(rng.integer(1, 2));
        ResidueShadow s = random_residue_shadow(rng, rank, n_punct);
        std::vector<std::string> labels;
        for (const PunctureShadow& p : s.punctures) labels.push_back(p.label);
        const std::string& t0 = labels[static_cast<std::size_t>(
            rng.integer(0, static_cast<long>(labels.size()) - 1))];

        if (rank >= 2) {
            int slot = static_cast<int>(rng.integer(1, rank - 1));
            GroupoidWord twice;
            twice.push({{GenKind::T, t0, slot}, false});
            twice.push({{GenKind::T, t0, slot}, false});
            rec.guarded("T is an involution on its domain",
                        [&] { return words_agree_at(twice, GroupoidWord{}, s, cfg); });
        }

        GroupoidWord uh;
        for (int i = 0; i < rank; ++i) uh.push({{GenKind::H, t0, 1}, false});
        uh.push({{GenKind::U, t0, 1}, false});
        rec.guarded("U undoes the full twist",
                    [&] { return words_agree_at(uh, GroupoidWord{}, s, cfg); });

        GroupoidWord w = random_word(rng, rank, labels, 6);
        NormalForm nf = normal_form(w, rank, labels);
        long msum = 0;
        for (const auto& [label, act] : nf.actions()) {
            msum += std::accumulate(act.m.begin(), act.m.end(), 0L);
        }
        rec.check(nf.degree() == -msum, "degree tracks the total shift");
        rec.check(nf.then(nf.inverse()).is_identity() &&
                      nf.inverse().then(nf).is_identity(),
                  "normal form inverse composes to the identity");
        rec.guarded("normal form reproduces factor-by-factor application", [&] {
            ResidueShadow via_word = apply_word(w, s, cfg);
            return shadows_equal(via_word, nf.apply(s, cfg), cfg.eps_eq);
        });

        rec.guarded("normalization lands in the window and is witnessed", [&] {
            auto [word, out] = deligne_normalize(s, cfg);
            for (const PunctureShadow& p : out.punctures) {
                for (cplx theta : p.theta) {
                    double re = (theta / out.lambda).real();
                    if (!(re > -1.0 - cfg.eps_eq && re <= cfg.eps_eq)) return false;
                }
            }
            return shadows_equal(apply_word(word, s, cfg), out, cfg.eps_eq);
        });
    }
    return std::move(rec.result);
}

SuiteResult suite_walls(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x77616c6cULL);
    for (int it = 0; it < 8; ++it) {
        int rank = static_cast<int>(rng.integer(2, 3));
        HarmonicShadow shadow = random_shadow(rng, rank, static_cast<int>(rng.integer(1, 2)));
        const double r_min = 0.2;
        const double r_max = 2.0;
        std::vector<DeltaPoint> delta;
        try {
            delta = delta_in_region(shadow, r_min, r_max, cfg);
        } catch (const DegenerateFamily& e) {
            rec.check(false, std::string("random family degenerate: ") + e.what());
            continue;
        }
        bool witnessed = true;
        bool in_annulus = true;
        for (const DeltaPoint& d : delta) {
            const KmsSpectrum& sp =
                shadow.punctures[static_cast<std::size_t>(
                                     shadow.puncture_index(d.puncture))]
                    .spectrum;
            cplx ei = flow(sp.points[d.i], d.lambda).e;
            cplx ej = flow(sp.points[d.j], d.lambda).e;
            if (std::abs(ei - ej - static_cast<double>(d.n) * d.lambda) > 1e-7) {
                witnessed = false;
            }
            double r = std::abs(d.lambda);
            if (r < r_min - 1e-9 || r > r_max + 1e-9) in_annulus = false;
        }
        rec.check(witnessed, "every reported collision is witnessed by the flow");
        rec.check(in_annulus, "reported collisions stay in the annulus");
        rec.check(std::is_sorted(delta.begin(), delta.end(),
                                 [](const DeltaPoint& x, const DeltaPoint& y) {
                                     double rx = std::abs(x.lambda);
                                     double ry = std::abs(y.lambda);
                                     if (rx != ry) return rx < ry;
                                     return std::arg(x.lambda) < std::arg(y.lambda);
                                 }),
                  "collision points are sorted by modulus");

        if (it < 3) {
            rec.guarded("cover separates collisions and keeps overlaps clean", [&] {
                std::vector<Disc> cover = build_cover(shadow, r_min, r_max, delta, cfg);
                std::vector<cplx> excluded{{0.0, 0.0}};
                for (const DeltaPoint& d : delta) excluded.push_back(d.lambda);
                for (cplx e : excluded) {
                    int owners = 0;
                    for (const Disc& disc : cover) {
                        if (disc.contains(e)) ++owners;
                    }
                    if (owners > 1) return false;
                }
                for (int gx = 0; gx < 40; ++gx) {
                    for (int gy = 0; gy < 40; ++gy) {
                        cplx z(-r_max + 2.0 * r_max * (gx + 0.5) / 40.0,
                               -r_max + 2.0 * r_max * (gy + 0.5) / 40.0);
                        if (std::abs(z) > r_max) continue;
                        bool covered = false;
                        for (const Disc& disc : cover) {
                            if (disc.contains(z)) {
                                covered = true;
                                break;
                            }
                        }
                        if (!covered) return false;
                    }
                }
                return true;
            });
        }
    }
    return std::move(rec.result);
}

Matrix random_unitary(Rng& rng, int n) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = {rng.normal(), rng.normal()};
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return q;
}

/// Genus-0 three-puncture system with generic distinct eigenvalues, conjugated
/// by a random unitary so nothing stays axis-aligned.
FilteredLocalSystem random_system(Rng& rng, int rank) {
    Matrix g1 = Matrix::Zero(rank, rank);
    Matrix g2 = Matrix::Zero(rank, rank);
    for (int i = 0; i < rank; ++i) {
        double mod1 = 0.6 + 0.45 * i + rng.uniform(0.0, 0.15);
        double mod2 = 0.7 + 0.55 * i + rng.uniform(0.0, 0.15);
        g1(i, i) = std::polar(mod1, rng.uniform(0.0, 6.28));
        g2(i, i) = std::polar(mod2, rng.uniform(0.0, 6.28));
        for (int j = i + 1; j < rank; ++j) {
            g1(i, j) = rng.complex_in_box(0.5);
            g2(i, j) = rng.complex_in_box(0.5);
        }
    }
    Matrix g3 = (g1 * g2).inverse();
    Eigen::ComplexSchur<Matrix> schur(g3);

    Matrix q = random_unitary(rng, rank);
    FilteredLocalSystem L;
    L.rank = rank;
    L.genus = 0;
    L.framing = Matrix::Identity(rank, rank);
    Matrix id = Matrix::Identity(rank, rank);
    L.punctures.push_back({"t1", q * g1 * q.adjoint(), q * id});
    L.punctures.push_back({"t2", q * g2 * q.adjoint(), q * id});
    L.punctures.push_back({"t3", q * g3 * q.adjoint(), q * schur.matrixU()});
    return L;
}

std::vector<int> random_permutation(Rng& rng, int n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        std::swap(perm[i], perm[static_cast<int>(rng.integer(0, i))]);
    }
    return perm;
}

bool multiset_close(std::vector<cplx> xs, std::vector<cplx> ys, double eps) {
    if (xs.size() != ys.size()) return false;
    std::vector<bool> used(ys.size(), false);
    for (cplx x : xs) {
        bool found = false;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            if (!used[j] && std::abs(x - ys[j]) <= eps) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

SuiteResult suite_betti(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x62657474ULL);
    for (int it = 0; it < 10; ++it) {
        int rank = static_cast<int>(rng.integer(2, 3));
        FilteredLocalSystem L = random_system(rng, rank);
        rec.guarded("random system satisfies its relations", [&] {
            validate_system(L, cfg);
            return true;
        });

        EigenvalueVector ev;
        try {
            ev = eigenvalue_map(L, cfg);
        } catch (const Error& e) {
            rec.check(false, std::string("eigenvalue map failed: ") + e.what());
            continue;
        }
        bool spectra_match = true;
        for (std::size_t t = 0; t < L.punctures.size(); ++t) {
            Eigen::ComplexEigenSolver<Matrix> es(L.punctures[t].gamma);
            std::vector<cplx> direct(es.eigenvalues().data(),
                                     es.eigenvalues().data() + rank);
            if (!multiset_close(ev.alphas[t], direct, 1e-6)) spectra_match = false;
        }
        rec.check(spectra_match, "graded eigenvalues agree with the raw spectrum");

        MultiPermutation sigma;
        for (const BettiPuncture& p : L.punctures) {
            sigma[p.label] = random_permutation(rng, rank);
        }
        if (!in_domain(sigma, ev, cfg)) continue;
        rec.guarded("swap-order independence of rearrangement", [&] {
            FilteredLocalSystem lr = flag_surgery(sigma, L, cfg, SwapOrder::LeftToRight);
            FilteredLocalSystem rl = flag_surgery(sigma, L, cfg, SwapOrder::RightToLeft);
            return system_flag_distance(lr, rl) <= cfg.eps_flag;
        });
        rec.guarded("rearrangement permutes the graded eigenvalues", [&] {
            FilteredLocalSystem out = flag_surgery(sigma, L, cfg);
            EigenvalueVector ev2 = eigenvalue_map(out, cfg);
            for (std::size_t t = 0; t < L.punctures.size(); ++t) {
                const std::vector<int>& perm = sigma[L.punctures[t].label];
                for (int i = 0; i < rank; ++i) {
                    if (std::abs(ev2.alphas[t][static_cast<std::size_t>(perm[i])] -
                                 ev.alphas[t][static_cast<std::size_t>(i)]) > 1e-6) {
                        return false;
                    }
                }
            }
            return true;
        });
        rec.guarded("rearranging back restores the flags", [&] {
            MultiPermutation inv;
            for (const auto& [label, perm] : sigma) {
                std::vector<int> ip(perm.size());
                for (std::size_t i = 0; i < perm.size(); ++i) {
                    ip[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
                }
                inv[label] = std::move(ip);
            }
            FilteredLocalSystem out = flag_surgery(inv, flag_surgery(sigma, L, cfg), cfg);
            return system_flag_distance(out, L) <= cfg.eps_flag;
        });
    }
    return std::move(rec.result);
}

SuiteResult suite_section(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x73656374ULL);
    int done = 0;
    int attempts = 0;
    while (done < 30 && attempts < 300) {
        ++attempts;
        HarmonicShadow shadow =
            random_shadow(rng, static_cast<int>(rng.integer(1, 3)),
                          static_cast<int>(rng.integer(1, 2)));
        cplx l1 = rng.complex_in_annulus(0.3, 2.0);
        cplx l2 = l1 + rng.complex_in_box(0.05);
        SectionSample s1, s2;
        Transition tr;
        try {
            s1 = local_order(shadow, l1, cfg);
            s2 = local_order(shadow, l2, cfg);
            tr = transition(s1, s2, cfg);
        } catch (const OrderingAmbiguous&) {
            continue;
        } catch (const DomainViolation&) {
            continue;
        }
        ++done;
        rec.guarded("reverse transition is the inverse", [&] {
            return transition(s2, s1, cfg).word.same_action(tr.word.inverse());
        });
        rec.guarded("transition carries one trivialization onto the other", [&] {
            // Both sections evaluated at the same parameter: applying the
            // transition to the first must reproduce the second exactly.
            ResidueShadow r1 = to_residue_shadow(s1);
            ResidueShadow other = to_residue_shadow(evaluate_section(shadow, s2, l1));
            return shadows_equal(tr.word.apply(r1, cfg), other, 1e-9);
        });
        rec.check(transition(s1, s1, cfg).word.is_identity(),
                  "self transition is the identity");
    }
    rec.check(done >= 20, "enough generic samples found");
    return std::move(rec.result);
}

SuiteResult suite_twistor(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x74776973ULL);
    for (int it = 0; it < 20; ++it) {
        WeightProfile profile{static_cast<int>(rng.integer(0, 3)),
                              static_cast<int>(rng.integer(0, 3)),
                              static_cast<int>(rng.integer(0, 3))};
        int d = static_cast<int>(rng.integer(0, 5));
        rec.guarded("symmetric power table matches enumeration",
                    [&] { return sym_check(profile, d).pass; });
        rec.guarded("table total is the full monomial count", [&] {
            WeightTable table = weight_table(profile, d);
            int n = profile.n0 + profile.n1 + profile.n2;
            long long count = 1;
            for (int i = 1; i <= d; ++i) count = count * (n + i - 1) / i;
            if (n == 0) count = d == 0 ? 1 : 0;
            return table.total() == count;
        });
        rec.guarded("weights add under monomial products", [&] {
            return filtration_product_check(profile, std::min(d + 1, 4)).pass;
        });
    }
    return std::move(rec.result);
}

SuiteResult suite_gluing(const Config& cfg) {
    Recorder rec;
    Rng rng(cfg.seed ^ 0x676c7565ULL);
    int done = 0;
    int attempts = 0;
    while (done < 12 && attempts < 120) {
        ++attempts;
        HarmonicShadow shadow =
            random_shadow(rng, static_cast<int>(rng.integer(1, 3)),
                          static_cast<int>(rng.integer(1, 2)));
        cplx lambda = rng.on_unit_circle();
        GlueReport report;
        try {
            report = glue_infinity(shadow, lambda, cfg);
        } catch (const OrderingAmbiguous&) {
            continue;
        } catch (const InfeasibleBall&) {
            continue;
        }
        ++done;
        rec.check(report.pass, "charts glue on the unit circle: " + report.detail);

        // Transport is involutive and lattice-compatible away from |.| = 1 too.
        ResidueShadow rs = to_residue_shadow(local_order(shadow, {0.7, 0.4}, cfg));
        ResidueShadow back = conjugate_shadow(conjugate_shadow(rs));
        rec.check(shadows_equal(back, rs, 1e-9), "conjugate transport is involutive");
    }
    rec.check(done >= 8, "enough generic gluing samples found");
    return std::move(rec.result);
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"flow", "groupoid", "walls", "betti", "section", "twistor", "gluing"};
}

SuiteResult run_suite(const std::string& name, const Config& cfg) {
    cfg.validate();
    SuiteResult result;
    if (name == "flow") {
        result = suite_flow(cfg);
    } else if (name == "groupoid") {
        result = suite_groupoid(cfg);
    } else if (name == "walls") {
        result = suite_walls(cfg);
    } else if (name == "betti") {
        result = suite_betti(cfg);
    } else if (name == "section") {
        result = suite_section(cfg);
    } else if (name == "twistor") {
        result = suite_twistor(cfg);
    } else if (name == "gluing") {
        result = suite_gluing(cfg);
    } else {
        throw SchemaError("unknown suite \"" + name + "\"");
    }
    result.name = name;
    result.pass = result.failures.empty();
    return result;
}

}  // namespace specshadow
