#include "specshadow/betti.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "specshadow/errors.hpp"
#include "specshadow/json_io.hpp"

namespace specshadow {

int FilteredLocalSystem::puncture_index(const std::string& label) const {
    for (std::size_t t = 0; t < punctures.size(); ++t) {
        if (punctures[t].label == label) return static_cast<int>(t);
    }
    return -1;
}

namespace {

double safe_scale(const Matrix& m) { return std::max(1.0, m.norm()); }

bool invertible(const Matrix& m, double rel_tol) {
    Eigen::JacobiSVD<Matrix> svd(m);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    return smax > 0.0 && smin > rel_tol * smax;
}

/// Unitary basis whose first j columns span the flag's first j columns.
Matrix orthonormal_flag(const Matrix& flag, const std::string& where) {
    const auto r = flag.rows();
    if (flag.cols() != r) {
        throw SchemaError(where + ": flag must be square");
    }
    Eigen::HouseholderQR<Matrix> qr(flag);
    Matrix R = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < r; ++k) {
        if (std::abs(R(k, k)) <= 1e-12 * safe_scale(flag)) {
            throw SchemaError(where + ": flag basis is singular");
        }
    }
    return qr.householderQ() * Matrix::Identity(r, r);
}

/// Flag-adapted matrix of gamma; throws unless it is upper triangular.
Matrix triangularize(const Matrix& Q, const Matrix& gamma, const std::string& where,
                     double eps) {
    Matrix T = Q.adjoint() * gamma * Q;
    double tol = eps * safe_scale(gamma);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::abs(T(i, j)) > tol) {
                throw FlagNotInvariant(where + ": flag is not invariant under gamma");
            }
        }
    }
    return T;
}

void check_square(const Matrix& m, int rank, const std::string& where) {
    if (m.rows() != rank || m.cols() != rank) {
        throw SchemaError(where + ": expected a " + std::to_string(rank) + "x" +
                          std::to_string(rank) + " matrix");
    }
}

std::vector<int> checked_permutation(const std::vector<int>& perm, int rank,
                                     const std::string& label) {
    if (static_cast<int>(perm.size()) != rank) {
        throw SchemaError("permutation at \"" + label + "\" has wrong length");
    }
    std::vector<bool> seen(rank, false);
    for (int image : perm) {
        if (image < 0 || image >= rank || seen[image]) {
            throw SchemaError("images at \"" + label + "\" are not a permutation");
        }
        seen[image] = true;
    }
    return perm;
}

}  // namespace

void validate_system(const FilteredLocalSystem& L, const Config& cfg) {
    cfg.validate();
    if (L.rank < 1) {
        throw SchemaError("system: rank must be at least 1");
    }
    if (L.genus < 0 || static_cast<int>(L.a.size()) != L.genus ||
        static_cast<int>(L.b.size()) != L.genus) {
        throw SchemaError("system: genus must match the a and b matrix counts");
    }
    for (int g = 0; g < L.genus; ++g) {
        check_square(L.a[g], L.rank, "system: a[" + std::to_string(g + 1) + "]");
        check_square(L.b[g], L.rank, "system: b[" + std::to_string(g + 1) + "]");
        if (!invertible(L.a[g], 1e-12) || !invertible(L.b[g], 1e-12)) {
            throw SchemaError("system: handle matrices must be invertible");
        }
    }
    check_square(L.framing, L.rank, "system: framing");
    if (!invertible(L.framing, 1e-12)) {
        throw SchemaError("system: framing must be invertible");
    }
    Matrix rel = Matrix::Identity(L.rank, L.rank);
    for (int g = 0; g < L.genus; ++g) {
        rel = rel * L.a[g] * L.b[g] * L.a[g].inverse() * L.b[g].inverse();
    }
    for (const BettiPuncture& p : L.punctures) {
        std::string where = "system: puncture \"" + p.label + "\"";
        check_square(p.gamma, L.rank, where + " gamma");
        if (!invertible(p.gamma, 1e-12)) {
            throw SchemaError(where + ": local monodromy must be invertible");
        }
        check_square(p.flag, L.rank, where + " flag");
        rel = rel * p.gamma;
        Matrix Q = orthonormal_flag(p.flag, where);
        triangularize(Q, p.gamma, where, cfg.eps_eq);
    }
    for (std::size_t t = 0; t < L.punctures.size(); ++t) {
        for (std::size_t u = t + 1; u < L.punctures.size(); ++u) {
            if (L.punctures[t].label == L.punctures[u].label) {
                throw SchemaError("system: duplicate puncture label \"" +
                                  L.punctures[t].label + "\"");
            }
        }
    }
    double dev = (rel - Matrix::Identity(L.rank, L.rank)).norm();
    if (dev > cfg.eps_rel * safe_scale(rel)) {
        std::ostringstream msg;
        msg << "system: surface relation fails by " << dev;
        throw SchemaError(msg.str());
    }
}

EigenvalueVector eigenvalue_map(const FilteredLocalSystem& L, const Config& cfg) {
    cfg.validate();
    EigenvalueVector ev;
    for (const BettiPuncture& p : L.punctures) {
        std::string where = "puncture \"" + p.label + "\"";
        Matrix Q = orthonormal_flag(p.flag, where);
        Matrix T = triangularize(Q, p.gamma, where, cfg.eps_eq);
        std::vector<cplx> alphas;
        for (Eigen::Index k = 0; k < T.rows(); ++k) alphas.push_back(T(k, k));
        ev.labels.push_back(p.label);
        ev.alphas.push_back(std::move(alphas));
    }
    return ev;
}

bool in_domain(const MultiPermutation& sigma, const EigenvalueVector& ev,
               const Config& cfg) {
    for (const auto& [label, perm] : sigma) {
        auto it = std::find(ev.labels.begin(), ev.labels.end(), label);
        if (it == ev.labels.end()) {
            throw SchemaError("eigenvalue vector lacks puncture \"" + label + "\"");
        }
        const std::vector<cplx>& alphas = ev.alphas[it - ev.labels.begin()];
        const int r = static_cast<int>(alphas.size());
        std::vector<int> p = checked_permutation(perm, r, label);
        for (int i = 0; i < r; ++i) {
            for (int j = i + 1; j < r; ++j) {
                if (p[i] > p[j] && std::abs(alphas[i] - alphas[j]) <= cfg.eps_eq) {
                    return false;
                }
            }
        }
    }
    return true;
}

namespace {

/// One adjacent surgery step at position k: inside V_{k+2}/V_k the other
/// eigenline of gamma replaces the line V_{k+1}/V_k. Q stays orthonormal.
void surgery_step(Matrix& Q, const Matrix& gamma, int k, const Config& cfg,
                  const std::string& label) {
    cplx alpha_k = (Q.col(k).adjoint() * gamma * Q.col(k))(0, 0);
    cplx alpha_k1 = (Q.col(k + 1).adjoint() * gamma * Q.col(k + 1))(0, 0);
    cplx t = (Q.col(k).adjoint() * gamma * Q.col(k + 1))(0, 0);
    if (std::abs(alpha_k - alpha_k1) <= cfg.eps_eq) {
        std::ostringstream msg;
        msg << "surgery at \"" << label << "\" slots " << k + 1 << "," << k + 2
            << ": graded eigenvalues coincide";
        throw DomainViolation(msg.str());
    }
    Eigen::VectorXcd u = t * Q.col(k) + (alpha_k1 - alpha_k) * Q.col(k + 1);
    Eigen::VectorXcd old_k = Q.col(k);
    u.normalize();
    Q.col(k) = u;
    Eigen::VectorXcd w = old_k - u * (u.adjoint() * old_k)(0, 0);
    w.normalize();
    Q.col(k + 1) = w;
}

}  // namespace

FilteredLocalSystem flag_surgery(const MultiPermutation& sigma,
                                 const FilteredLocalSystem& L, const Config& cfg,
                                 SwapOrder order) {
    cfg.validate();
    FilteredLocalSystem out = L;
    for (const auto& [label, perm] : sigma) {
        int idx = out.puncture_index(label);
        if (idx < 0) {
            throw SchemaError("system lacks puncture \"" + label + "\"");
        }
        BettiPuncture& p = out.punctures[idx];
        std::vector<int> target = checked_permutation(perm, L.rank, label);
        std::vector<int> inv(L.rank);
        for (int i = 0; i < L.rank; ++i) inv[target[i]] = i;

        Matrix Q = orthonormal_flag(p.flag, "puncture \"" + label + "\"");
        triangularize(Q, p.gamma, "puncture \"" + label + "\"", cfg.eps_eq);

        // Occupants of the slots; every swap below exchanges a pair that the
        // permutation inverts, so only inverted pairs need distinct values.
        std::vector<int> occupant(L.rank);
        for (int i = 0; i < L.rank; ++i) occupant[i] = i;
        auto swap_at = [&](int s) {
            surgery_step(Q, p.gamma, s, cfg, label);
            std::swap(occupant[s], occupant[s + 1]);
        };
        if (order == SwapOrder::LeftToRight) {
            for (int pos = 0; pos < L.rank; ++pos) {
                int q = pos;
                while (occupant[q] != inv[pos]) ++q;
                for (int s = q - 1; s >= pos; --s) swap_at(s);
            }
        } else {
            for (int pos = L.rank - 1; pos >= 0; --pos) {
                int q = pos;
                while (occupant[q] != inv[pos]) --q;
                for (int s = q; s < pos; ++s) swap_at(s);
            }
        }
        p.flag = Q;
    }
    return out;
}

namespace {

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

}  // namespace

int commutant_dimension(const FilteredLocalSystem& L, const Config& cfg) {
    cfg.validate();
    const int r = L.rank;
    const Matrix id = Matrix::Identity(r, r);
    std::vector<Matrix> blocks;
    auto add_commutation = [&](const Matrix& M) {
        // vec(M X - X M) = (I (x) M - M^T (x) I) vec(X), column-major vec.
        blocks.push_back(kron(id, M) - kron(M.transpose(), id));
    };
    for (const Matrix& m : L.a) add_commutation(m);
    for (const Matrix& m : L.b) add_commutation(m);
    for (const BettiPuncture& p : L.punctures) {
        add_commutation(p.gamma);
        Matrix Q = orthonormal_flag(p.flag, "puncture \"" + p.label + "\"");
        for (int j = 1; j < r; ++j) {
            Matrix Qj = Q.leftCols(j);
            Matrix Qperp = Q.rightCols(r - j);
            // X preserves V_j iff Qperp^H X Qj = 0.
            blocks.push_back(kron(Qj.transpose(), Qperp.adjoint()));
        }
    }
    if (blocks.empty()) return r * r;
    Eigen::Index rows = 0;
    for (const Matrix& b : blocks) rows += b.rows();
    Matrix S(rows, r * r);
    Eigen::Index at = 0;
    for (const Matrix& b : blocks) {
        S.middleRows(at, b.rows()) = b;
        at += b.rows();
    }
    Eigen::JacobiSVD<Matrix> svd(S);
    double smax = svd.singularValues()(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > cfg.eps_eq * std::max(1.0, smax)) ++rank;
    }
    return r * r - rank;
}

double flag_distance(const Matrix& flag1, const Matrix& flag2) {
    if (flag1.rows() != flag2.rows() || flag1.cols() != flag2.cols()) {
        throw SchemaError("flag distance: flags must have equal shape");
    }
    Matrix Q1 = orthonormal_flag(flag1, "first flag");
    Matrix Q2 = orthonormal_flag(flag2, "second flag");
    const int r = static_cast<int>(flag1.rows());
    double worst = 0.0;
    for (int j = 1; j < r; ++j) {
        // sin(largest angle) = top singular value of Qperp^H Q2_j; the sine
        // route keeps full precision near zero angle where acos(cos) loses
        // half the digits.
        Matrix cross = Q1.rightCols(r - j).adjoint() * Q2.leftCols(j);
        Eigen::JacobiSVD<Matrix> svd(cross);
        double s = std::clamp(svd.singularValues()(0), 0.0, 1.0);
        worst = std::max(worst, std::asin(s));
    }
    return worst;
}

double system_flag_distance(const FilteredLocalSystem& L1, const FilteredLocalSystem& L2) {
    if (L1.punctures.size() != L2.punctures.size()) {
        throw SchemaError("flag distance: systems disagree on punctures");
    }
    double worst = 0.0;
    for (const BettiPuncture& p : L1.punctures) {
        int idx = L2.puncture_index(p.label);
        if (idx < 0) {
            throw SchemaError("flag distance: second system lacks puncture \"" +
                              p.label + "\"");
        }
        worst = std::max(worst, flag_distance(p.flag, L2.punctures[idx].flag));
    }
    return worst;
}

ComposeReport compose_check(const MultiPermutation& tau, const MultiPermutation& sigma,
                            const FilteredLocalSystem& L, const Config& cfg) {
    MultiPermutation composite;
    std::vector<int> ident(L.rank);
    for (int i = 0; i < L.rank; ++i) ident[i] = i;
    auto lookup = [&](const MultiPermutation& mp, const std::string& label) {
        auto it = mp.find(label);
        return it == mp.end() ? ident : checked_permutation(it->second, L.rank, label);
    };
    for (const BettiPuncture& p : L.punctures) {
        std::vector<int> s = lookup(sigma, p.label);
        std::vector<int> t = lookup(tau, p.label);
        std::vector<int> comp(L.rank);
        for (int i = 0; i < L.rank; ++i) comp[i] = t[s[i]];
        composite[p.label] = comp;
    }
    FilteredLocalSystem stepped = flag_surgery(tau, flag_surgery(sigma, L, cfg), cfg);
    FilteredLocalSystem direct = flag_surgery(composite, L, cfg);
    ComposeReport report;
    report.max_angle = system_flag_distance(stepped, direct);
    report.pass = report.max_angle <= cfg.eps_flag;
    std::ostringstream detail;
    detail << "two-step vs composite surgery: max principal angle " << report.max_angle;
    report.detail = detail.str();
    return report;
}

namespace {

Matrix matrix_from_json(const json& j, int rank, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rank) {
        throw SchemaError(where + ": expected " + std::to_string(rank) + " rows");
    }
    Matrix m(rank, rank);
    for (int i = 0; i < rank; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != rank) {
            throw SchemaError(where + ": row " + std::to_string(i + 1) + " must have " +
                              std::to_string(rank) + " entries");
        }
        for (int k = 0; k < rank; ++k) {
            m(i, k) = complex_from_json(j[i][k], where + ": entry (" +
                                                     std::to_string(i + 1) + "," +
                                                     std::to_string(k + 1) + ")");
        }
    }
    return m;
}

}  // namespace

FilteredLocalSystem system_from_json_text(const std::string& text,
                                          const std::string& source_name,
                                          const Config& cfg) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(source_name + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) {
        throw SchemaError(source_name + ": top level must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key != "rank" && key != "genus" && key != "a" && key != "b" &&
            key != "punctures" && key != "framing") {
            throw SchemaError(source_name + ": unknown key \"" + key + "\"");
        }
    }
    if (!j.contains("rank") || !j["rank"].is_number_integer()) {
        throw SchemaError(source_name + ": \"rank\" must be an integer");
    }
    FilteredLocalSystem L;
    L.rank = j["rank"].get<int>();
    if (L.rank < 1) {
        throw SchemaError(source_name + ": \"rank\" must be at least 1");
    }
    if (!j.contains("genus") || !j["genus"].is_number_integer() ||
        j["genus"].get<int>() < 0) {
        throw SchemaError(source_name + ": \"genus\" must be a non-negative integer");
    }
    L.genus = j["genus"].get<int>();
    auto matrices = [&](const char* key, int count) {
        std::vector<Matrix> ms;
        if (!j.contains(key) || !j[key].is_array() ||
            static_cast<int>(j[key].size()) != count) {
            throw SchemaError(source_name + ": \"" + key + "\" must hold " +
                              std::to_string(count) + " matrices");
        }
        for (int g = 0; g < count; ++g) {
            ms.push_back(matrix_from_json(j[key][g], L.rank,
                                          source_name + ": " + key + "[" +
                                              std::to_string(g + 1) + "]"));
        }
        return ms;
    };
    L.a = matrices("a", L.genus);
    L.b = matrices("b", L.genus);
    if (!j.contains("punctures") || !j["punctures"].is_array()) {
        throw SchemaError(source_name + ": \"punctures\" must be an array");
    }
    for (std::size_t t = 0; t < j["punctures"].size(); ++t) {
        const json& pj = j["punctures"][t];
        std::string where = source_name + ": punctures[" + std::to_string(t + 1) + "]";
        if (!pj.is_object() || !pj.contains("label") || !pj["label"].is_string() ||
            !pj.contains("gamma") || !pj.contains("flag")) {
            throw SchemaError(where + ": expected label, gamma and flag");
        }
        BettiPuncture p;
        p.label = pj["label"].get<std::string>();
        p.gamma = matrix_from_json(pj["gamma"], L.rank, where + " gamma");
        p.flag = matrix_from_json(pj["flag"], L.rank, where + " flag");
        L.punctures.push_back(std::move(p));
    }
    if (j.contains("framing")) {
        L.framing = matrix_from_json(j["framing"], L.rank, source_name + ": framing");
    } else {
        L.framing = Matrix::Identity(L.rank, L.rank);
    }
    validate_system(L, cfg);
    return L;
}

FilteredLocalSystem system_from_json_file(const std::string& path, const Config& cfg) {
    return system_from_json_text(read_text_file(path), path, cfg);
}

}  // namespace specshadow
