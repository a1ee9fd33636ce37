#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "specshadow/errors.hpp"
#include "specshadow/groupoid.hpp"
#include "specshadow/rng.hpp"
#include "support.hpp"

using namespace specshadow;
using testsupport::make_residue;
using testsupport::multiset_close;
using testsupport::puncture_labels;
using testsupport::random_residue;
using testsupport::random_word;

namespace {

Generator gen(GenKind kind, const std::string& label, int slot = 1) {
    Generator g;
    g.kind = kind;
    g.puncture = label;
    g.slot = slot;
    return g;
}

bool theta_close(const std::vector<cplx>& xs, const std::vector<cplx>& ys,
                 double eps = 1e-12) {
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - ys[i]) > eps) return false;
    }
    return true;
}

long word_degree(const GroupoidWord& w, int rank) {
    long d = 0;
    for (const Factor& f : w.factors()) {
        long step = 0;
        if (f.gen.kind == GenKind::H) step = -1;
        if (f.gen.kind == GenKind::U) step = rank;
        d += f.inverse ? -step : step;
    }
    return d;
}

}  // namespace

TEST_CASE("H rotates the tuple and feeds the last slot a lambda") {
    ResidueShadow s = make_residue({5.0, 0.0}, {{"t1", {{0, 0}, {1, 0}, {2, 0}}}});
    ResidueShadow out = apply_generator(gen(GenKind::H, "t1"), s);
    CHECK(theta_close(out.punctures[0].theta, {{7, 0}, {0, 0}, {1, 0}}));
    CHECK(out.degree_offset == -1);
    CHECK(out.lambda == s.lambda);
}

TEST_CASE("T swaps adjacent slots and refuses equal eigenvalues") {
    ResidueShadow s = make_residue({5.0, 0.0}, {{"t1", {{0, 0}, {1, 0}, {2, 0}}}});
    ResidueShadow out = apply_generator(gen(GenKind::T, "t1", 1), s);
    CHECK(theta_close(out.punctures[0].theta, {{1, 0}, {0, 0}, {2, 0}}));
    CHECK(out.degree_offset == 0);

    ResidueShadow bad = make_residue({5.0, 0.0}, {{"t1", {{0, 0}, {0, 0}, {1, 0}}}});
    CHECK_THROWS_AS(apply_generator(gen(GenKind::T, "t1", 1), bad), DomainViolation);
}

TEST_CASE("U subtracts lambda from every slot and carries degree rank") {
    ResidueShadow s = make_residue({5.0, 0.0}, {{"t1", {{0, 0}, {1, 0}, {2, 0}}}});
    ResidueShadow out = apply_generator(gen(GenKind::U, "t1"), s);
    CHECK(theta_close(out.punctures[0].theta, {{-5, 0}, {-4, 0}, {-3, 0}}));
    CHECK(out.degree_offset == 3);
}

TEST_CASE("U composed with H cubed is the identity at rank 3") {
    ResidueShadow s = make_residue({5.0, 0.0}, {{"t1", {{0, 0}, {1, 0}, {2, 0}}}});
    GroupoidWord w = GroupoidWord::parse("U(t1) H(t1)^3");
    ResidueShadow out = apply_word(w, s);
    CHECK(theta_close(out.punctures[0].theta, s.punctures[0].theta));
    CHECK(out.degree_offset == 0);

    NormalForm nf = normal_form(w, 3, {"t1"});
    CHECK(nf.is_identity());
}

TEST_CASE("word parsing reads rightmost-first and round-trips") {
    GroupoidWord w = GroupoidWord::parse("U(t1) H(t1)^3 T(t2,1)^-1");
    REQUIRE(w.size() == 5);
    CHECK(w.factors()[0].gen.kind == GenKind::T);
    CHECK(w.factors()[0].gen.puncture == "t2");
    CHECK(w.factors()[0].inverse);
    CHECK(w.factors()[1].gen.kind == GenKind::H);
    CHECK(w.factors()[4].gen.kind == GenKind::U);
    CHECK(w.str() == "U(t1) H(t1)^3 T(t2,1)^-1");

    CHECK(GroupoidWord::parse("").empty());
    CHECK(GroupoidWord{}.str().empty());
    CHECK(GroupoidWord::parse("H(t1)^-2").str() == "H(t1)^-2");
}

TEST_CASE("word parsing rejects malformed text") {
    CHECK_THROWS_AS(GroupoidWord::parse("H"), SchemaError);
    CHECK_THROWS_AS(GroupoidWord::parse("T(t1)"), SchemaError);
    CHECK_THROWS_AS(GroupoidWord::parse("H(t1)^x"), SchemaError);
    CHECK_THROWS_AS(GroupoidWord::parse("Q(t1)"), SchemaError);
    CHECK_THROWS_AS(GroupoidWord::parse("H(t1) banana"), SchemaError);
    CHECK_THROWS_AS(GroupoidWord::parse("T(t1,0)"), SchemaError);
}

TEST_CASE("word inverse reverses and flips factors") {
    GroupoidWord w = GroupoidWord::parse("U(t1) H(t1)^2");
    GroupoidWord inv = w.inverse();
    CHECK(inv.str() == "H(t1)^-2 U(t1)^-1");
    Rng rng(3101);
    ResidueShadow s = random_residue(rng, 2, 1);
    s.punctures[0].label = "t1";
    ResidueShadow round = apply_word(inv, apply_word(w, s));
    CHECK(theta_close(round.punctures[0].theta, s.punctures[0].theta, 1e-12));
    CHECK(round.degree_offset == s.degree_offset);
}

TEST_CASE("normal form of the inverted H T gadget") {
    GroupoidWord w = GroupoidWord::parse("T(t1,1)^-1 H(t1)^-1");
    NormalForm nf = normal_form(w, 2, {"t1"});
    const PunctureAction& act = nf.action("t1");
    CHECK(act.sigma == std::vector<int>{0, 1});
    CHECK(act.m == std::vector<long>{-1, 0});
    CHECK(nf.degree() == 1);
    REQUIRE(act.domain.size() == 1);
    CHECK(act.domain[0].i == 0);
    CHECK(act.domain[0].j == 1);
    CHECK(act.domain[0].c == 1);
}

TEST_CASE("normal form pulls T constraints back through H") {
    // T(1) after H: net effect adds lambda to the second slot; the swap's
    // constraint pulled back through H reads theta_1 - theta_2 != lambda.
    GroupoidWord w = GroupoidWord::parse("T(t1,1) H(t1)");
    NormalForm nf = normal_form(w, 2, {"t1"});
    const PunctureAction& act = nf.action("t1");
    CHECK(act.sigma == std::vector<int>{0, 1});
    CHECK(act.m == std::vector<long>{0, 1});
    CHECK(nf.degree() == -1);
    REQUIRE(act.domain.size() == 1);
    CHECK(act.domain[0] == DomainConstraint{0, 1, 1});

    ResidueShadow s = make_residue({0.5, 0.25}, {{"t1", {{0.3, 0.1}, {-1.2, 0.8}}}});
    ResidueShadow via_word = apply_word(w, s);
    ResidueShadow via_nf = nf.apply(s);
    CHECK(theta_close(via_word.punctures[0].theta, via_nf.punctures[0].theta));
    CHECK(via_word.degree_offset == via_nf.degree_offset);
}

TEST_CASE("normal form detects the identity and refuses broken inputs") {
    NormalForm id = NormalForm::identity(3, {"t1", "t2"});
    CHECK(id.is_identity());
    CHECK(id.degree() == 0);
    CHECK(normal_form(GroupoidWord{}, 3, {"t1"}).is_identity());

    GroupoidWord t = GroupoidWord::parse("T(t1,1)");
    NormalForm nt = normal_form(t, 2, {"t1"});
    CHECK_FALSE(nt.is_identity());
    CHECK(nt.action("t1").sigma == std::vector<int>{1, 0});
    CHECK(nt.then(nt).is_identity());
    REQUIRE(nt.action("t1").domain.size() == 1);
    CHECK(nt.action("t1").domain[0] == DomainConstraint{0, 1, 0});
}

TEST_CASE("relations hold on random shadows") {
    Rng rng(3102);
    Config cfg;
    for (int n = 0; n < 100; ++n) {
        int rank = static_cast<int>(rng.integer(1, 4));
        ResidueShadow s = random_residue(rng, rank, 2);
        std::vector<std::string> labels = puncture_labels(s);

        if (rank >= 2) {
            int slot = static_cast<int>(rng.integer(1, rank - 1));
            std::string lab = labels[static_cast<std::size_t>(
                rng.integer(0, static_cast<long>(labels.size()) - 1))];
            GroupoidWord tt = GroupoidWord::parse("T(" + lab + "," + std::to_string(slot) +
                                                  ")^2");
            CHECK(words_agree_at(tt, GroupoidWord{}, s, cfg));
        }

        std::string lab = labels[0];
        GroupoidWord uh = GroupoidWord::parse("U(" + lab + ") H(" + lab + ")^" +
                                              std::to_string(rank));
        GroupoidWord hu = GroupoidWord::parse("H(" + lab + ")^" + std::to_string(rank) +
                                              " U(" + lab + ")");
        CHECK(words_agree_at(uh, GroupoidWord{}, s, cfg));
        CHECK(words_agree_at(hu, GroupoidWord{}, s, cfg));
        CHECK(normal_form(uh, rank, labels).is_identity());
        CHECK(normal_form(hu, rank, labels).is_identity());
    }
}

TEST_CASE("normal forms compose, invert and certify word equality") {
    Rng rng(3103);
    Config cfg;
    int agree = 0;
    for (int n = 0; n < 80; ++n) {
        int rank = static_cast<int>(rng.integer(2, 4));
        ResidueShadow s = random_residue(rng, rank, 1);
        std::vector<std::string> labels = puncture_labels(s);
        GroupoidWord w1 = random_word(rng, labels, rank, static_cast<int>(rng.integer(0, 6)));
        GroupoidWord w2 = random_word(rng, labels, rank, static_cast<int>(rng.integer(0, 6)));
        NormalForm n1 = normal_form(w1, rank, labels);
        NormalForm n2 = normal_form(w2, rank, labels);

        CHECK(n1.then(n1.inverse()).is_identity());
        CHECK(n1.inverse().then(n1).is_identity());

        GroupoidWord joined = w1;
        joined.append(w2);
        CHECK(normal_form(joined, rank, labels).same_action(n1.then(n2)));

        bool same = n1.same_action(n2);
        bool agreed = false;
        try {
            agreed = words_agree_at(w1, w2, s, cfg);
        } catch (const DomainViolation&) {
            continue;  // generic shadows rarely land on a wall; skip those
        }
        CHECK(agreed == same);
        if (agreed) ++agree;

        if (n1.in_domain(s, cfg)) {
            ResidueShadow via_word = apply_word(w1, s, cfg);
            ResidueShadow via_nf = n1.apply(s, cfg);
            CHECK(theta_close(via_word.punctures[0].theta, via_nf.punctures[0].theta, 1e-9));
            CHECK(via_word.degree_offset == via_nf.degree_offset);
            CHECK(via_nf.degree_offset - s.degree_offset == n1.degree());
        }
    }
    CHECK(agree >= 1);  // the identity-pair draws make a few agreements certain
}

TEST_CASE("degree of a word is its H and U letter count") {
    Rng rng(3104);
    for (int n = 0; n < 60; ++n) {
        int rank = static_cast<int>(rng.integer(1, 5));
        std::vector<std::string> labels = {"t1", "t2"};
        GroupoidWord w = random_word(rng, labels, rank, static_cast<int>(rng.integer(0, 8)));
        NormalForm nf = normal_form(w, rank, labels);
        CHECK(nf.degree() == word_degree(w, rank));
        long msum = 0;
        for (const auto& [label, act] : nf.actions()) {
            for (long m : act.m) msum += m;
        }
        CHECK(nf.degree() == -msum);
    }
}

TEST_CASE("normalization moves every slot into the half-open window") {
    SUBCASE("worked example at lambda = 1") {
        ResidueShadow s = make_residue({1.0, 0.0}, {{"t1", {{2.5, 0.0}, {-0.25, 0.0}}}});
        auto [word, norm] = deligne_normalize(s);
        CHECK(theta_close(norm.punctures[0].theta, {{-0.5, 0.0}, {-0.25, 0.0}}, 1e-12));
        CHECK(norm.degree_offset - s.degree_offset == 3);
        ResidueShadow replay = apply_word(word, s);
        CHECK(theta_close(replay.punctures[0].theta, norm.punctures[0].theta, 1e-12));
        CHECK(replay.degree_offset == norm.degree_offset);
    }
    SUBCASE("left window endpoint is excluded") {
        ResidueShadow s = make_residue({1.0, 0.0}, {{"t1", {{-1.0, 0.0}, {0.0, 0.0}}}});
        auto [word, norm] = deligne_normalize(s);
        CHECK(theta_close(norm.punctures[0].theta, {{0.0, 0.0}, {0.0, 0.0}}, 1e-12));
        CHECK_FALSE(word.empty());
    }
    SUBCASE("already normalized shadows return the empty word") {
        ResidueShadow s = make_residue({1.0, 0.0}, {{"t1", {{-0.5, 0.3}, {0.0, -0.7}}}});
        auto [word, norm] = deligne_normalize(s);
        CHECK(word.empty());
        CHECK(theta_close(norm.punctures[0].theta, s.punctures[0].theta));
    }
    SUBCASE("lambda = 0 is rejected") {
        ResidueShadow s = make_residue({0.0, 0.0}, {{"t1", {{0.5, 0.0}}}});
        CHECK_THROWS_AS(deligne_normalize(s), LambdaZero);
    }
    SUBCASE("random shadows land in the window") {
        Rng rng(3105);
        Config cfg;
        for (int n = 0; n < 60; ++n) {
            ResidueShadow s = random_residue(rng, static_cast<int>(rng.integer(1, 3)), 1);
            if (std::abs(s.lambda) < 0.2) s.lambda += cplx{0.5, 0.0};
            try {
                auto [word, norm] = deligne_normalize(s, cfg);
                for (const auto& p : norm.punctures) {
                    for (const cplx& th : p.theta) {
                        double re = (th / norm.lambda).real();
                        CHECK(re > -1.0 - cfg.eps_eq);
                        CHECK(re <= cfg.eps_eq);
                    }
                }
            } catch (const DomainViolation&) {
                // a slot pair collided mid-normalization; acceptable for random draws
            }
        }
    }
}

TEST_CASE("orbit of a rank-1 shadow is the lattice of lambda translates") {
    ResidueShadow s = make_residue({0.7, 0.3}, {{"t1", {{0.2, 0.1}}}});
    std::vector<OrbitEntry> entries = orbit(s, 2);
    REQUIRE(entries.size() == 5);
    std::set<long> offsets;
    for (const OrbitEntry& e : entries) {
        cplx diff = (e.shadow.punctures[0].theta[0] - s.punctures[0].theta[0]) / s.lambda;
        CHECK(std::abs(diff.imag()) <= 1e-9);
        long k = std::lround(diff.real());
        CHECK(std::abs(diff.real() - static_cast<double>(k)) <= 1e-9);
        offsets.insert(k);
        ResidueShadow replay = e.witness.apply(s);
        CHECK(theta_close(replay.punctures[0].theta, e.shadow.punctures[0].theta, 1e-9));
        CHECK(replay.degree_offset == e.shadow.degree_offset);
    }
    CHECK(offsets == std::set<long>{-2, -1, 0, 1, 2});
}

TEST_CASE("orbit at lambda = 0 only reindexes the tuple") {
    ResidueShadow s = make_residue({0.0, 0.0}, {{"t1", {{0.4, 0.0}, {-1.3, 0.5}}}});
    std::vector<OrbitEntry> entries = orbit(s, 3);
    CHECK(entries.size() >= 2);
    for (const OrbitEntry& e : entries) {
        CHECK(multiset_close(e.shadow.punctures[0].theta, s.punctures[0].theta, 1e-12));
    }
}

TEST_CASE("orbit length zero is the base shadow alone") {
    ResidueShadow s = make_residue({0.7, 0.3}, {{"t1", {{0.2, 0.1}}}});
    std::vector<OrbitEntry> entries = orbit(s, 0);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].witness.is_identity());
}

TEST_CASE("groupoid words preserve the monodromy multiset") {
    Rng rng(3106);
    Config cfg;
    auto mono = [](const ResidueShadow& s) {
        std::vector<cplx> out;
        for (const cplx& th : s.punctures[0].theta) {
            out.push_back(std::exp(cplx{0.0, -2.0 * 3.14159265358979323846} * th / s.lambda));
        }
        return out;
    };
    for (int n = 0; n < 40; ++n) {
        int rank = static_cast<int>(rng.integer(1, 3));
        ResidueShadow s = random_residue(rng, rank, 1);
        if (std::abs(s.lambda) < 0.3) s.lambda += cplx{0.6, 0.0};
        GroupoidWord w = random_word(rng, {"t1"}, rank, 4);
        try {
            ResidueShadow out = apply_word(w, s, cfg);
            CHECK(testsupport::multiset_close_rel(mono(out), mono(s), 1e-9));
        } catch (const DomainViolation&) {
        }
    }
}
