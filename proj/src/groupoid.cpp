#include "specshadow/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "specshadow/errors.hpp"

namespace specshadow {

int ResidueShadow::puncture_index(const std::string& label) const {
    for (std::size_t t = 0; t < punctures.size(); ++t) {
        if (punctures[t].label == label) return static_cast<int>(t);
    }
    return -1;
}

int ResidueShadow::rank() const {
    if (punctures.empty()) {
        throw SchemaError("residue shadow has no punctures");
    }
    std::size_t r = punctures.front().theta.size();
    for (const PunctureShadow& p : punctures) {
        if (p.theta.size() != r) {
            throw SchemaError("residue shadow punctures disagree on rank");
        }
    }
    if (r == 0) {
        throw SchemaError("residue shadow has empty residue tuples");
    }
    return static_cast<int>(r);
}

bool shadows_equal(const ResidueShadow& s1, const ResidueShadow& s2, double eps) {
    if (std::abs(s1.lambda - s2.lambda) > eps) return false;
    if (s1.degree_offset != s2.degree_offset || s1.chart != s2.chart) return false;
    if (s1.punctures.size() != s2.punctures.size()) return false;
    for (std::size_t t = 0; t < s1.punctures.size(); ++t) {
        const PunctureShadow& p1 = s1.punctures[t];
        const PunctureShadow& p2 = s2.punctures[t];
        if (p1.label != p2.label || p1.theta.size() != p2.theta.size()) return false;
        for (std::size_t i = 0; i < p1.theta.size(); ++i) {
            if (std::abs(p1.theta[i] - p2.theta[i]) > eps) return false;
        }
    }
    return true;
}

namespace {

bool same_generator(const Generator& g1, const Generator& g2) {
    return g1.kind == g2.kind && g1.puncture == g2.puncture &&
           (g1.kind != GenKind::T || g1.slot == g2.slot);
}

[[noreturn]] void parse_fail(const std::string& token, const std::string& what) {
    throw SchemaError("word: bad factor \"" + token + "\": " + what);
}

Factor parse_base(const std::string& token, std::size_t& pos) {
    Factor f;
    switch (token[0]) {
        case 'H': f.gen.kind = GenKind::H; break;
        case 'T': f.gen.kind = GenKind::T; break;
        case 'U': f.gen.kind = GenKind::U; break;
        default: parse_fail(token, "unknown generator name");
    }
    if (token.size() < 2 || token[1] != '(') parse_fail(token, "expected '('");
    std::size_t close = token.find(')', 2);
    if (close == std::string::npos) parse_fail(token, "missing ')'");
    std::string args = token.substr(2, close - 2);
    if (f.gen.kind == GenKind::T) {
        std::size_t comma = args.find(',');
        if (comma == std::string::npos) parse_fail(token, "T needs a label and a slot");
        f.gen.puncture = args.substr(0, comma);
        std::string slot = args.substr(comma + 1);
        if (slot.empty() || slot.find_first_not_of("0123456789") != std::string::npos) {
            parse_fail(token, "slot must be a positive integer");
        }
        f.gen.slot = std::stoi(slot);
        if (f.gen.slot < 1) parse_fail(token, "slot must be at least 1");
    } else {
        if (args.find(',') != std::string::npos) {
            parse_fail(token, "only T takes a slot argument");
        }
        f.gen.puncture = args;
    }
    if (f.gen.puncture.empty()) parse_fail(token, "empty puncture label");
    pos = close + 1;
    return f;
}

long parse_power(const std::string& token, std::size_t pos) {
    if (pos == token.size()) return 1;
    if (token[pos] != '^') parse_fail(token, "unexpected trailing characters");
    std::string digits = token.substr(pos + 1);
    bool negative = !digits.empty() && digits[0] == '-';
    if (negative) digits.erase(0, 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        parse_fail(token, "power must be an integer");
    }
    long n = std::stol(digits);
    return negative ? -n : n;
}

}  // namespace

GroupoidWord GroupoidWord::parse(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string token;
    while (in >> token) tokens.push_back(token);
    // Display order reads right to left, so the rightmost token applies first.
    std::vector<Factor> factors;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        std::size_t pos = 0;
        Factor f = parse_base(*it, pos);
        long power = parse_power(*it, pos);
        f.inverse = power < 0;
        for (long k = 0; k < std::labs(power); ++k) factors.push_back(f);
    }
    return GroupoidWord(std::move(factors));
}

std::string GroupoidWord::str() const {
    std::ostringstream out;
    bool first = true;
    // Display order is the reverse of application order.
    for (std::size_t k = factors_.size(); k > 0;) {
        std::size_t run_end = k;
        const Factor& f = factors_[k - 1];
        while (k > 0 && same_generator(factors_[k - 1].gen, f.gen) &&
               factors_[k - 1].inverse == f.inverse) {
            --k;
        }
        long power = static_cast<long>(run_end - k);
        if (f.inverse) power = -power;
        if (!first) out << ' ';
        first = false;
        switch (f.gen.kind) {
            case GenKind::H: out << "H(" << f.gen.puncture << ")"; break;
            case GenKind::U: out << "U(" << f.gen.puncture << ")"; break;
            case GenKind::T: out << "T(" << f.gen.puncture << "," << f.gen.slot << ")"; break;
        }
        if (power != 1) out << "^" << power;
    }
    return out.str();
}

void GroupoidWord::append(const GroupoidWord& w) {
    factors_.insert(factors_.end(), w.factors_.begin(), w.factors_.end());
}

GroupoidWord GroupoidWord::inverse() const {
    std::vector<Factor> inv(factors_.rbegin(), factors_.rend());
    for (Factor& f : inv) f.inverse = !f.inverse;
    return GroupoidWord(std::move(inv));
}

namespace {

DomainConstraint normalized(DomainConstraint c) {
    if (c.i == c.j) {
        throw SchemaError("domain constraint needs two distinct slots");
    }
    if (c.i > c.j) {
        std::swap(c.i, c.j);
        c.c = -c.c;
    }
    return c;
}

void sort_dedup(std::vector<DomainConstraint>& cs) {
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

std::vector<int> inverse_permutation(const std::vector<int>& sigma) {
    std::vector<int> inv(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) inv[sigma[i]] = static_cast<int>(i);
    return inv;
}

}  // namespace

NormalForm NormalForm::identity(int rank, const std::vector<std::string>& punctures) {
    if (rank < 1) {
        throw SchemaError("normal form rank must be at least 1");
    }
    NormalForm nf;
    for (const std::string& label : punctures) {
        PunctureAction act;
        act.sigma.resize(rank);
        std::iota(act.sigma.begin(), act.sigma.end(), 0);
        act.m.assign(rank, 0);
        if (!nf.actions_.emplace(label, std::move(act)).second) {
            throw SchemaError("duplicate puncture label \"" + label + "\"");
        }
    }
    if (nf.actions_.empty()) {
        throw SchemaError("normal form needs at least one puncture");
    }
    return nf;
}

NormalForm NormalForm::then(const NormalForm& next) const {
    if (actions_.size() != next.actions_.size()) {
        throw SchemaError("composed normal forms disagree on punctures");
    }
    NormalForm out;
    for (const auto& [label, act] : actions_) {
        auto it = next.actions_.find(label);
        if (it == next.actions_.end()) {
            throw SchemaError("composed normal forms disagree on punctures");
        }
        const PunctureAction& nxt = it->second;
        const std::size_t r = act.sigma.size();
        if (nxt.sigma.size() != r) {
            throw SchemaError("composed normal forms disagree on rank");
        }
        PunctureAction tot;
        tot.sigma.resize(r);
        tot.m.resize(r);
        for (std::size_t i = 0; i < r; ++i) {
            tot.sigma[i] = nxt.sigma[act.sigma[i]];
            tot.m[i] = act.m[i] + nxt.m[act.sigma[i]];
        }
        tot.domain = act.domain;
        // Pull next's constraints back through this action: intermediate slot
        // i holds theta_u + m_u * lambda with u = sigma^{-1}(i).
        std::vector<int> inv = inverse_permutation(act.sigma);
        for (const DomainConstraint& c : nxt.domain) {
            int u = inv[c.i];
            int v = inv[c.j];
            tot.domain.push_back(normalized({u, v, c.c - act.m[u] + act.m[v]}));
        }
        sort_dedup(tot.domain);
        out.actions_.emplace(label, std::move(tot));
    }
    out.degree_ = degree_ + next.degree_;
    return out;
}

NormalForm NormalForm::inverse() const {
    NormalForm out;
    for (const auto& [label, act] : actions_) {
        const std::size_t r = act.sigma.size();
        PunctureAction inv;
        inv.sigma = inverse_permutation(act.sigma);
        inv.m.resize(r);
        for (std::size_t i = 0; i < r; ++i) inv.m[act.sigma[i]] = -act.m[i];
        // Push constraints forward onto the image slots.
        for (const DomainConstraint& c : act.domain) {
            inv.domain.push_back(normalized(
                {act.sigma[c.i], act.sigma[c.j], c.c + act.m[c.i] - act.m[c.j]}));
        }
        sort_dedup(inv.domain);
        out.actions_.emplace(label, std::move(inv));
    }
    out.degree_ = -degree_;
    return out;
}

bool NormalForm::same_action(const NormalForm& other) const {
    if (degree_ != other.degree_ || actions_.size() != other.actions_.size()) {
        return false;
    }
    for (const auto& [label, act] : actions_) {
        auto it = other.actions_.find(label);
        if (it == other.actions_.end()) return false;
        if (act.sigma != it->second.sigma || act.m != it->second.m) return false;
    }
    return true;
}

bool NormalForm::is_identity() const {
    if (degree_ != 0) return false;
    for (const auto& [label, act] : actions_) {
        for (std::size_t i = 0; i < act.sigma.size(); ++i) {
            if (act.sigma[i] != static_cast<int>(i) || act.m[i] != 0) return false;
        }
    }
    return true;
}

bool NormalForm::in_domain(const ResidueShadow& s, const Config& cfg) const {
    for (const auto& [label, act] : actions_) {
        int idx = s.puncture_index(label);
        if (idx < 0) {
            throw SchemaError("shadow lacks puncture \"" + label + "\"");
        }
        const std::vector<cplx>& theta = s.punctures[idx].theta;
        if (theta.size() != act.sigma.size()) {
            throw SchemaError("shadow and normal form disagree on rank");
        }
        for (const DomainConstraint& c : act.domain) {
            if (std::abs(theta[c.i] - theta[c.j] - static_cast<double>(c.c) * s.lambda) <=
                cfg.eps_eq) {
                return false;
            }
        }
    }
    return true;
}

ResidueShadow NormalForm::apply(const ResidueShadow& s, const Config& cfg) const {
    for (const auto& [label, act] : actions_) {
        int idx = s.puncture_index(label);
        if (idx < 0) {
            throw SchemaError("shadow lacks puncture \"" + label + "\"");
        }
        const std::vector<cplx>& theta = s.punctures[idx].theta;
        if (theta.size() != act.sigma.size()) {
            throw SchemaError("shadow and normal form disagree on rank");
        }
        for (const DomainConstraint& c : act.domain) {
            if (std::abs(theta[c.i] - theta[c.j] - static_cast<double>(c.c) * s.lambda) <=
                cfg.eps_eq) {
                std::ostringstream msg;
                msg << "normal form undefined at puncture \"" << label << "\": theta_"
                    << c.i + 1 << " - theta_" << c.j + 1 << " = " << c.c << " * lambda";
                throw DomainViolation(msg.str());
            }
        }
    }
    ResidueShadow out = s;
    out.degree_offset += degree_;
    for (const auto& [label, act] : actions_) {
        int idx = s.puncture_index(label);
        const std::vector<cplx>& theta = s.punctures[idx].theta;
        std::vector<cplx> next(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) {
            next[act.sigma[i]] = theta[i] + static_cast<double>(act.m[i]) * s.lambda;
        }
        out.punctures[idx].theta = std::move(next);
    }
    return out;
}

void NormalForm::add_constraint(const std::string& label, DomainConstraint c) {
    auto it = actions_.find(label);
    if (it == actions_.end()) {
        throw SchemaError("normal form lacks puncture \"" + label + "\"");
    }
    it->second.domain.push_back(normalized(c));
    sort_dedup(it->second.domain);
}

ResidueShadow apply_generator(const Generator& g, const ResidueShadow& s,
                              const Config& cfg, bool inverse) {
    int idx = s.puncture_index(g.puncture);
    if (idx < 0) {
        throw SchemaError("shadow lacks puncture \"" + g.puncture + "\"");
    }
    const int r = s.rank();
    ResidueShadow out = s;
    std::vector<cplx>& theta = out.punctures[idx].theta;
    switch (g.kind) {
        case GenKind::H: {
            std::vector<cplx> next(theta.size());
            if (!inverse) {
                next[0] = theta[r - 1] + s.lambda;
                for (int i = 1; i < r; ++i) next[i] = theta[i - 1];
                out.degree_offset -= 1;
            } else {
                for (int i = 0; i + 1 < r; ++i) next[i] = theta[i + 1];
                next[r - 1] = theta[0] - s.lambda;
                out.degree_offset += 1;
            }
            theta = std::move(next);
            break;
        }
        case GenKind::T: {
            if (g.slot < 1 || g.slot > r - 1) {
                std::ostringstream msg;
                msg << "T slot " << g.slot << " out of range for rank " << r;
                throw SchemaError(msg.str());
            }
            int i = g.slot - 1;
            if (std::abs(theta[i] - theta[i + 1]) <= cfg.eps_eq) {
                std::ostringstream msg;
                msg << "T(" << g.puncture << "," << g.slot
                    << ") undefined: equal residues in slots " << g.slot << " and "
                    << g.slot + 1;
                throw DomainViolation(msg.str());
            }
            std::swap(theta[i], theta[i + 1]);
            break;
        }
        case GenKind::U: {
            cplx shift = inverse ? s.lambda : -s.lambda;
            for (cplx& z : theta) z += shift;
            out.degree_offset += inverse ? -r : r;
            break;
        }
    }
    return out;
}

ResidueShadow apply_word(const GroupoidWord& w, const ResidueShadow& s,
                         const Config& cfg) {
    ResidueShadow cur = s;
    const std::vector<Factor>& fs = w.factors();
    for (std::size_t k = 0; k < fs.size(); ++k) {
        try {
            cur = apply_generator(fs[k].gen, cur, cfg, fs[k].inverse);
        } catch (const DomainViolation& e) {
            std::ostringstream msg;
            msg << "factor " << k << " of \"" << w.str() << "\": " << e.what();
            throw DomainViolation(msg.str(), static_cast<std::ptrdiff_t>(k));
        }
    }
    return cur;
}

namespace {

NormalForm atomic_form(const Factor& f, int rank,
                       const std::vector<std::string>& punctures) {
    NormalForm nf = NormalForm::identity(rank, punctures);
    PunctureAction& act = nf.action(f.gen.puncture);
    switch (f.gen.kind) {
        case GenKind::H: {
            for (int i = 0; i < rank; ++i) act.sigma[i] = (i + 1) % rank;
            act.m[rank - 1] = 1;
            nf.set_degree(-1);
            break;
        }
        case GenKind::T: {
            if (f.gen.slot < 1 || f.gen.slot > rank - 1) {
                std::ostringstream msg;
                msg << "T slot " << f.gen.slot << " out of range for rank " << rank;
                throw SchemaError(msg.str());
            }
            int i = f.gen.slot - 1;
            std::swap(act.sigma[i], act.sigma[i + 1]);
            act.domain.push_back({i, i + 1, 0});
            break;
        }
        case GenKind::U: {
            act.m.assign(rank, -1);
            nf.set_degree(rank);
            break;
        }
    }
    return f.inverse ? nf.inverse() : nf;
}

}  // namespace

NormalForm normal_form(const GroupoidWord& w, int rank,
                       const std::vector<std::string>& punctures) {
    NormalForm acc = NormalForm::identity(rank, punctures);
    for (const Factor& f : w.factors()) {
        if (std::find(punctures.begin(), punctures.end(), f.gen.puncture) ==
            punctures.end()) {
            throw SchemaError("word uses unknown puncture \"" + f.gen.puncture + "\"");
        }
        acc = acc.then(atomic_form(f, rank, punctures));
    }
    return acc;
}

bool words_agree_at(const GroupoidWord& w1, const GroupoidWord& w2,
                    const ResidueShadow& s, const Config& cfg) {
    ResidueShadow out1 = apply_word(w1, s, cfg);
    ResidueShadow out2 = apply_word(w2, s, cfg);
    return shadows_equal(out1, out2, cfg.eps_eq);
}

namespace {

/// Word shifting slot i0 (0-based) by +lambda and fixing all other slots:
/// bubble slot i0 to the end, cycle with H, bubble the front back to i0.
GroupoidWord shift_gadget(const std::string& label, int i0, int rank) {
    std::vector<Factor> fs;
    for (int k = i0; k + 1 < rank; ++k) {
        fs.push_back({{GenKind::T, label, k + 1}, false});
    }
    fs.push_back({{GenKind::H, label, 1}, false});
    for (int k = 0; k < i0; ++k) {
        fs.push_back({{GenKind::T, label, k + 1}, false});
    }
    return GroupoidWord(std::move(fs));
}

}  // namespace

std::pair<GroupoidWord, ResidueShadow> deligne_normalize(const ResidueShadow& s,
                                                         const Config& cfg) {
    cfg.validate();
    if (s.lambda == cplx(0.0, 0.0)) {
        throw LambdaZero("deligne normalization needs lambda != 0");
    }
    const int r = s.rank();
    GroupoidWord word;
    ResidueShadow cur = s;
    for (const PunctureShadow& p : s.punctures) {
        int idx = cur.puncture_index(p.label);
        std::vector<long> m(r);
        long m_min = 0;
        long m_max = 0;
        for (int i = 0; i < r; ++i) {
            double x = std::real(cur.punctures[idx].theta[i] / cur.lambda);
            if (!std::isfinite(x)) {
                throw SchemaError("non-finite residue at puncture \"" + p.label + "\"");
            }
            m[i] = window_shift(x);
            m_min = std::min(m_min, m[i]);
            m_max = std::max(m_max, m[i]);
        }
        // Global-part exponent: U costs one factor per lattice step, a full
        // H cycle costs r, and every leftover slot shift costs one gadget of
        // r factors.
        long best_q = 0;
        long best_cost = -1;
        for (long q = m_min - 1; q <= m_max + 1; ++q) {
            long cost = (q <= 0 ? -q : q * r);
            for (int i = 0; i < r; ++i) cost += r * std::labs(m[i] - q);
            bool better = best_cost < 0 || cost < best_cost ||
                          (cost == best_cost && std::labs(q) < std::labs(best_q)) ||
                          (cost == best_cost && std::labs(q) == std::labs(best_q) &&
                           q < best_q);
            if (better) {
                best_q = q;
                best_cost = cost;
            }
        }
        GroupoidWord local;
        if (best_q < 0) {
            for (long k = 0; k < -best_q; ++k) {
                local.push({{GenKind::U, p.label, 1}, false});
            }
        } else if (best_q > 0) {
            for (long k = 0; k < best_q * r; ++k) {
                local.push({{GenKind::H, p.label, 1}, false});
            }
        }
        for (int i = 0; i < r; ++i) {
            long d = m[i] - best_q;
            GroupoidWord gadget = shift_gadget(p.label, i, r);
            if (d < 0) gadget = gadget.inverse();
            for (long k = 0; k < std::labs(d); ++k) local.append(gadget);
        }
        cur = apply_word(local, cur, cfg);
        word.append(local);
    }
    return {std::move(word), std::move(cur)};
}

std::vector<OrbitEntry> orbit(const ResidueShadow& s, int max_word_length,
                              const Config& cfg) {
    cfg.validate();
    const int r = s.rank();
    std::vector<std::string> labels;
    for (const PunctureShadow& p : s.punctures) labels.push_back(p.label);

    struct Move {
        Generator gen;
        bool inverse;
    };
    std::vector<Move> moves;
    for (const std::string& label : labels) {
        moves.push_back({{GenKind::H, label, 1}, false});
        moves.push_back({{GenKind::H, label, 1}, true});
        for (int k = 1; k < r; ++k) {
            moves.push_back({{GenKind::T, label, k}, false});
        }
        moves.push_back({{GenKind::U, label, 1}, false});
        moves.push_back({{GenKind::U, label, 1}, true});
    }

    std::vector<OrbitEntry> entries;
    entries.push_back({s, NormalForm::identity(r, labels)});
    std::deque<std::size_t> frontier{0};
    for (int depth = 0; depth < max_word_length && !frontier.empty(); ++depth) {
        std::deque<std::size_t> next_frontier;
        for (std::size_t e : frontier) {
            for (const Move& mv : moves) {
                ResidueShadow out;
                try {
                    out = apply_generator(mv.gen, entries[e].shadow, cfg, mv.inverse);
                } catch (const DomainViolation&) {
                    continue;
                }
                bool known = false;
                for (const OrbitEntry& known_entry : entries) {
                    if (shadows_equal(out, known_entry.shadow, cfg.eps_eq)) {
                        known = true;
                        break;
                    }
                }
                if (known) continue;
                NormalForm witness =
                    entries[e].witness.then(atomic_form({mv.gen, mv.inverse}, r, labels));
                entries.push_back({std::move(out), std::move(witness)});
                next_frontier.push_back(entries.size() - 1);
            }
        }
        frontier = std::move(next_frontier);
    }
    return entries;
}

}  // namespace specshadow
