#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "specshadow/betti.hpp"
#include "specshadow/errors.hpp"
#include "specshadow/rng.hpp"
#include "support.hpp"

using namespace specshadow;
using testsupport::multiset_close;

namespace {

Matrix mat2(cplx a, cplx b, cplx c, cplx d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

FilteredLocalSystem pair_system(const Matrix& g1, const Matrix& flag1) {
    FilteredLocalSystem L;
    L.rank = static_cast<int>(g1.rows());
    L.genus = 0;
    L.punctures.push_back({"t1", g1, flag1});
    L.punctures.push_back({"t2", g1.inverse(), flag1});
    L.framing = Matrix::Identity(L.rank, L.rank);
    return L;
}

Matrix random_unitary(Rng& rng, int r) {
    Matrix m(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) m(i, j) = cplx{rng.normal(), rng.normal()};
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    return q;
}

/// Upper-triangular rank-r system with prescribed diagonal, conjugated by a
/// random unitary so the flags are not axis-aligned.
FilteredLocalSystem random_system(Rng& rng, const std::vector<cplx>& diag) {
    int r = static_cast<int>(diag.size());
    Matrix g = Matrix::Zero(r, r);
    for (int i = 0; i < r; ++i) {
        g(i, i) = diag[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < r; ++j) g(i, j) = 0.3 * cplx{rng.normal(), rng.normal()};
    }
    Matrix q = random_unitary(rng, r);
    FilteredLocalSystem L;
    L.rank = r;
    L.genus = 0;
    L.punctures.push_back({"t1", q * g * q.adjoint(), q * Matrix::Identity(r, r)});
    L.punctures.push_back({"t2", q * g.inverse() * q.adjoint(), q * Matrix::Identity(r, r)});
    L.framing = Matrix::Identity(r, r);
    return L;
}

std::vector<cplx> graded(const FilteredLocalSystem& L, int t) {
    return eigenvalue_map(L).alphas[static_cast<std::size_t>(t)];
}

MultiPermutation swap01() { return {{"t1", {1, 0}}}; }

}  // namespace

TEST_CASE("eigenvalue map reads the graded diagonal") {
    Matrix id2m = Matrix::Identity(2, 2);
    SUBCASE("diagonal matrix") {
        FilteredLocalSystem L = pair_system(mat2(2, 0, 0, 3), id2m);
        std::vector<cplx> a = graded(L, 0);
        CHECK(std::abs(a[0] - cplx{2, 0}) <= 1e-12);
        CHECK(std::abs(a[1] - cplx{3, 0}) <= 1e-12);
    }
    SUBCASE("triangular matrix keeps the flag grading") {
        FilteredLocalSystem L = pair_system(mat2(2, 1, 0, 3), id2m);
        std::vector<cplx> a = graded(L, 0);
        CHECK(std::abs(a[0] - cplx{2, 0}) <= 1e-12);
        CHECK(std::abs(a[1] - cplx{3, 0}) <= 1e-12);
    }
    SUBCASE("identity matrix") {
        Matrix id3 = Matrix::Identity(3, 3);
        FilteredLocalSystem L;
        L.rank = 3;
        L.genus = 0;
        L.punctures.push_back({"t1", id3, id3});
        L.framing = id3;
        std::vector<cplx> a = graded(L, 0);
        for (const cplx& x : a) CHECK(std::abs(x - cplx{1, 0}) <= 1e-12);
        CHECK(eigenvalue_map(L).labels == std::vector<std::string>{"t1"});
    }
    SUBCASE("graded eigenvalues agree with the spectrum as a multiset") {
        Rng rng(6101);
        for (int n = 0; n < 20; ++n) {
            FilteredLocalSystem L = random_system(
                rng, {cplx{2, 0}, cplx{0.5, 0.5}, cplx{-1, 0.25}});
            Eigen::ComplexEigenSolver<Matrix> es(L.punctures[0].gamma);
            std::vector<cplx> spec(es.eigenvalues().data(),
                                   es.eigenvalues().data() + es.eigenvalues().size());
            CHECK(multiset_close(graded(L, 0), spec, 1e-6));
        }
    }
}

TEST_CASE("eigenvalue map refuses non-invariant flags") {
    FilteredLocalSystem L = pair_system(mat2(0, 1, 1, 0), Matrix::Identity(2, 2));
    CHECK_THROWS_AS(eigenvalue_map(L), FlagNotInvariant);
}

TEST_CASE("permutation domain requires distinct eigenvalues on inverted pairs") {
    EigenvalueVector ev;
    ev.labels = {"t1"};
    SUBCASE("equal pair blocks the swap") {
        ev.alphas = {{{5, 0}, {5, 0}}};
        CHECK_FALSE(in_domain(swap01(), ev));
        CHECK(in_domain({}, ev));  // empty permutation = identity everywhere
    }
    SUBCASE("reversal needs every pair distinct") {
        ev.alphas = {{{1, 0}, {1, 0}, {2, 0}}};
        CHECK_FALSE(in_domain({{"t1", {2, 1, 0}}}, ev));
        CHECK_FALSE(in_domain({{"t1", {1, 0, 2}}}, ev));
        CHECK(in_domain({{"t1", {0, 2, 1}}}, ev));
    }
}

TEST_CASE("flag surgery swaps the graded line to the other eigenline") {
    Matrix id2m = Matrix::Identity(2, 2);
    SUBCASE("diagonal: new first line is the second axis") {
        FilteredLocalSystem L = pair_system(mat2(2, 0, 0, 3), id2m);
        FilteredLocalSystem out = flag_surgery(swap01(), L);
        const Matrix& f = out.punctures[0].flag;
        // first column proportional to e2
        CHECK(std::abs(f(0, 0)) <= 1e-12);
        CHECK(std::abs(f(1, 0)) > 0.9);
        std::vector<cplx> a = graded(out, 0);
        CHECK(std::abs(a[0] - cplx{3, 0}) <= 1e-9);
        CHECK(std::abs(a[1] - cplx{2, 0}) <= 1e-9);
        // matrices and framing untouched
        CHECK((out.punctures[0].gamma - L.punctures[0].gamma).norm() == 0.0);
        CHECK((out.framing - L.framing).norm() == 0.0);
    }
    SUBCASE("triangular: new first line is the 3-eigenvector through (1,1)") {
        FilteredLocalSystem L = pair_system(mat2(2, 1, 0, 3), id2m);
        FilteredLocalSystem out = flag_surgery(swap01(), L);
        const Matrix& f = out.punctures[0].flag;
        cplx ratio = f(0, 0) / f(1, 0);
        CHECK(std::abs(ratio - cplx{1, 0}) <= 1e-9);
        std::vector<cplx> a = graded(out, 0);
        CHECK(std::abs(a[0] - cplx{3, 0}) <= 1e-9);
        CHECK(std::abs(a[1] - cplx{2, 0}) <= 1e-9);
    }
}

TEST_CASE("flag surgery permutes graded eigenvalues by sigma") {
    Rng rng(6102);
    for (int n = 0; n < 25; ++n) {
        FilteredLocalSystem L =
            random_system(rng, {cplx{2, 0}, cplx{-1, 1}, cplx{0.25, -0.5}});
        std::vector<int> sigma = {0, 1, 2};
        for (int i = 2; i > 0; --i) {
            std::swap(sigma[static_cast<std::size_t>(i)],
                      sigma[static_cast<std::size_t>(rng.integer(0, i))]);
        }
        MultiPermutation mp = {{"t1", sigma}};
        FilteredLocalSystem out = flag_surgery(mp, L);
        std::vector<cplx> before = graded(L, 0);
        std::vector<cplx> after = graded(out, 0);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(after[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] -
                           before[static_cast<std::size_t>(i)]) <= 1e-8);
        }
        // untouched puncture keeps its flag
        CHECK((out.punctures[1].flag - L.punctures[1].flag).norm() == 0.0);
    }
}

TEST_CASE("flag surgery in both swap orders agrees and involutes") {
    Rng rng(6103);
    Config cfg;
    for (int n = 0; n < 25; ++n) {
        FilteredLocalSystem L = random_system(
            rng, {cplx{2, 0}, cplx{-0.5, 1.5}, cplx{0.1, -0.8}, cplx{3, 0.5}});
        std::vector<int> sigma = {0, 1, 2, 3};
        for (int i = 3; i > 0; --i) {
            std::swap(sigma[static_cast<std::size_t>(i)],
                      sigma[static_cast<std::size_t>(rng.integer(0, i))]);
        }
        MultiPermutation mp = {{"t1", sigma}};
        FilteredLocalSystem lr = flag_surgery(mp, L, cfg, SwapOrder::LeftToRight);
        FilteredLocalSystem rl = flag_surgery(mp, L, cfg, SwapOrder::RightToLeft);
        CHECK(system_flag_distance(lr, rl) <= cfg.eps_flag);

        std::vector<int> inv(4);
        for (int i = 0; i < 4; ++i) {
            inv[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = i;
        }
        FilteredLocalSystem back = flag_surgery({{"t1", inv}}, lr, cfg);
        CHECK(system_flag_distance(back, L) <= cfg.eps_flag);
    }
}

TEST_CASE("adjacent swaps satisfy the braid relation") {
    Rng rng(6104);
    Config cfg;
    MultiPermutation s1 = {{"t1", {1, 0, 2}}};
    MultiPermutation s2 = {{"t1", {0, 2, 1}}};
    for (int n = 0; n < 15; ++n) {
        FilteredLocalSystem L =
            random_system(rng, {cplx{2, 0}, cplx{-1, 1}, cplx{0.25, -0.5}});
        FilteredLocalSystem lhs = flag_surgery(s1, flag_surgery(s2, flag_surgery(s1, L)));
        FilteredLocalSystem rhs = flag_surgery(s2, flag_surgery(s1, flag_surgery(s2, L)));
        CHECK(system_flag_distance(lhs, rhs) <= cfg.eps_flag);
    }
}

TEST_CASE("two-step surgery matches the composite permutation") {
    Rng rng(6105);
    MultiPermutation tau = {{"t1", {1, 0, 2}}};
    MultiPermutation sigma = {{"t1", {0, 2, 1}}};
    for (int n = 0; n < 10; ++n) {
        FilteredLocalSystem L =
            random_system(rng, {cplx{2, 0}, cplx{-1, 1}, cplx{0.25, -0.5}});
        ComposeReport rep = compose_check(tau, sigma, L);
        CHECK(rep.pass);
        CHECK(rep.max_angle <= 1e-8);
    }
    // tau = sigma = a transposition composes to the identity
    FilteredLocalSystem L = pair_system(mat2(2, 1, 0, 3), Matrix::Identity(2, 2));
    ComposeReport rep = compose_check(swap01(), swap01(), L);
    CHECK(rep.pass);
}

TEST_CASE("surgery with equal eigenvalues is out of domain") {
    FilteredLocalSystem L = pair_system(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK_THROWS_AS(flag_surgery(swap01(), L), DomainViolation);
}

TEST_CASE("distinct eigenvalues force distinct flags off the identity") {
    Rng rng(6106);
    FilteredLocalSystem L = random_system(rng, {cplx{2, 0}, cplx{-1, 1}, cplx{0.25, -0.5}});
    Config cfg;
    std::vector<std::vector<int>> perms = {{1, 0, 2}, {0, 2, 1}, {2, 1, 0},
                                           {1, 2, 0}, {2, 0, 1}};
    for (const auto& sigma : perms) {
        FilteredLocalSystem out = flag_surgery({{"t1", sigma}}, L, cfg);
        CHECK(system_flag_distance(out, L) > cfg.eps_flag);
    }
}

TEST_CASE("commutant dimension grades irreducibility") {
    SUBCASE("generic aligned pair has a two-dimensional commutant") {
        FilteredLocalSystem L = pair_system(mat2(2, 1, 0, 3), Matrix::Identity(2, 2));
        CHECK(commutant_dimension(L) == 2);
    }
    SUBCASE("three-puncture genus-zero example is irreducible") {
        Matrix g1 = mat2(2, 1, 0, 1);
        Matrix g2 = mat2(3, 0, 0, 1);
        Matrix g3 = (g1 * g2).inverse();
        FilteredLocalSystem L;
        L.rank = 2;
        L.genus = 0;
        Matrix id2m = Matrix::Identity(2, 2);
        L.punctures.push_back({"t1", g1, id2m});
        L.punctures.push_back({"t2", g2, id2m});
        L.punctures.push_back({"t3", g3, id2m});
        L.framing = id2m;
        validate_system(L);
        CHECK(commutant_dimension(L) == 1);
    }
    SUBCASE("trivial holonomy leaves the full flag stabilizer") {
        Matrix id3 = Matrix::Identity(3, 3);
        FilteredLocalSystem L;
        L.rank = 3;
        L.genus = 0;
        L.punctures.push_back({"t1", id3, id3});
        L.punctures.push_back({"t2", id3, id3});
        L.framing = id3;
        CHECK(commutant_dimension(L) == 6);  // r (r + 1) / 2
    }
    SUBCASE("rank one is always one-dimensional") {
        Matrix one = Matrix::Identity(1, 1);
        FilteredLocalSystem L;
        L.rank = 1;
        L.genus = 0;
        L.punctures.push_back({"t1", one * cplx{5, 0}, one});
        L.punctures.push_back({"t2", one / cplx{5, 0}, one});
        L.framing = one;
        CHECK(commutant_dimension(L) == 1);
    }
}

TEST_CASE("system validation checks the surface relation and flags") {
    Matrix id2m = Matrix::Identity(2, 2);
    SUBCASE("broken relation") {
        FilteredLocalSystem L;
        L.rank = 2;
        L.genus = 0;
        L.punctures.push_back({"t1", mat2(2, 0, 0, 3), id2m});
        L.framing = id2m;
        CHECK_THROWS_AS(validate_system(L), SchemaError);
    }
    SUBCASE("singular local monodromy") {
        FilteredLocalSystem L;
        L.rank = 2;
        L.genus = 0;
        L.punctures.push_back({"t1", mat2(0, 0, 0, 0), id2m});
        L.punctures.push_back({"t2", id2m, id2m});
        L.framing = id2m;
        CHECK_THROWS_AS(validate_system(L), SchemaError);
    }
    SUBCASE("non-invariant flag") {
        FilteredLocalSystem L = pair_system(mat2(0, 1, 1, 0), id2m);
        CHECK_THROWS_AS(validate_system(L), FlagNotInvariant);
    }
    SUBCASE("genus one commutator relation") {
        Matrix a = mat2(1, 1, 0, 1);
        Matrix b = mat2(1, 0, 1, 1);
        Matrix commutator = a * b * a.inverse() * b.inverse();
        Matrix g1 = commutator.inverse();
        // flag adapted to g1: Schur form columns
        Eigen::ComplexSchur<Matrix> schur(g1);
        FilteredLocalSystem L;
        L.rank = 2;
        L.genus = 1;
        L.a = {a};
        L.b = {b};
        L.punctures.push_back({"t1", g1, schur.matrixU()});
        L.framing = id2m;
        CHECK_NOTHROW(validate_system(L));
    }
}

TEST_CASE("system documents load with defaulted framing") {
    std::string text = R"({
  "rank": 2,
  "genus": 0,
  "a": [],
  "b": [],
  "punctures": [
    {"label": "t1",
     "gamma": [[[2.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
     "flag":  [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]},
    {"label": "t2",
     "gamma": [[[3.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
     "flag":  [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]},
    {"label": "t3",
     "gamma": [[[0.16666666666666666, 0.0], [-0.16666666666666666, 0.0]],
               [[0.0, 0.0], [1.0, 0.0]]],
     "flag":  [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}
  ]
})";
    FilteredLocalSystem L = system_from_json_text(text, "doc");
    CHECK(L.rank == 2);
    CHECK(L.punctures.size() == 3);
    CHECK((L.framing - Matrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK(commutant_dimension(L) == 1);

    CHECK_THROWS_AS(system_from_json_text(R"({"rank": 2})", "doc"), SchemaError);
    CHECK_THROWS_AS(system_from_json_text("[]", "doc"), SchemaError);
}
