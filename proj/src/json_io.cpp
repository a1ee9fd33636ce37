#include "specshadow/json_io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "specshadow/errors.hpp"

namespace specshadow {

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SchemaError(where + ": expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json normal_form_to_json(const NormalForm& nf) {
    json punctures = json::object();
    json domain = json::array();
    for (const auto& [label, act] : nf.actions()) {
        json sigma = json::array();
        for (int image : act.sigma) sigma.push_back(image + 1);
        json m = json::array();
        for (long shift : act.m) m.push_back(shift);
        punctures[label] = json{{"sigma", sigma}, {"m", m}};
        for (const DomainConstraint& c : act.domain) {
            domain.push_back(json::array({label, c.i + 1, c.j + 1, c.c}));
        }
    }
    return json{{"punctures", punctures}, {"degree", nf.degree()}, {"domain", domain}};
}

NormalForm normal_form_from_json(const json& j) {
    if (!j.is_object() || !j.contains("punctures") || !j["punctures"].is_object()) {
        throw SchemaError("normal form: expected an object with \"punctures\"");
    }
    std::vector<std::string> labels;
    int rank = -1;
    for (auto it = j["punctures"].begin(); it != j["punctures"].end(); ++it) {
        labels.push_back(it.key());
        const json& act = it.value();
        if (!act.is_object() || !act.contains("sigma") || !act["sigma"].is_array()) {
            throw SchemaError("normal form: puncture \"" + it.key() +
                              "\" must carry a \"sigma\" array");
        }
        int r = static_cast<int>(act["sigma"].size());
        if (rank >= 0 && r != rank) {
            throw SchemaError("normal form: punctures disagree on rank");
        }
        rank = r;
    }
    if (rank < 1) {
        throw SchemaError("normal form: needs at least one slot per puncture");
    }
    NormalForm nf = NormalForm::identity(rank, labels);
    for (const std::string& label : labels) {
        const json& act = j["punctures"][label];
        if (!act.contains("m") || !act["m"].is_array() ||
            static_cast<int>(act["m"].size()) != rank) {
            throw SchemaError("normal form: puncture \"" + label +
                              "\" must carry an \"m\" array of rank length");
        }
        PunctureAction& pa = nf.action(label);
        std::vector<bool> seen(rank, false);
        for (int i = 0; i < rank; ++i) {
            const json& v = act["sigma"][i];
            if (!v.is_number_integer()) {
                throw SchemaError("normal form: sigma entries must be integers");
            }
            int image = v.get<int>() - 1;
            if (image < 0 || image >= rank || seen[image]) {
                throw SchemaError("normal form: sigma is not a permutation at \"" +
                                  label + "\"");
            }
            seen[image] = true;
            pa.sigma[i] = image;
            if (!act["m"][i].is_number_integer()) {
                throw SchemaError("normal form: m entries must be integers");
            }
            pa.m[i] = act["m"][i].get<long>();
        }
    }
    if (!j.contains("degree") || !j["degree"].is_number_integer()) {
        throw SchemaError("normal form: missing integer \"degree\"");
    }
    nf.set_degree(j["degree"].get<long>());
    if (j.contains("domain")) {
        if (!j["domain"].is_array()) {
            throw SchemaError("normal form: \"domain\" must be an array");
        }
        for (const json& cj : j["domain"]) {
            if (!cj.is_array() || cj.size() != 4 || !cj[0].is_string() ||
                !cj[1].is_number_integer() || !cj[2].is_number_integer() ||
                !cj[3].is_number_integer()) {
                throw SchemaError("normal form: domain entries are [label, i, j, c]");
            }
            std::string label = cj[0].get<std::string>();
            DomainConstraint c{cj[1].get<int>() - 1, cj[2].get<int>() - 1,
                               cj[3].get<long>()};
            if (c.i < 0 || c.j < 0 || c.i >= rank || c.j >= rank || c.i == c.j) {
                throw SchemaError("normal form: domain slot indices out of range");
            }
            nf.add_constraint(label, c);
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "punctures" && it.key() != "degree" && it.key() != "domain") {
            throw SchemaError("normal form: unknown key \"" + it.key() + "\"");
        }
    }
    return nf;
}

json residue_shadow_to_json(const ResidueShadow& s) {
    json punctures = json::array();
    for (const PunctureShadow& p : s.punctures) {
        json theta = json::array();
        for (cplx z : p.theta) theta.push_back(complex_to_json(z));
        punctures.push_back(json{{"label", p.label}, {"theta", theta}});
    }
    return json{{"lambda", complex_to_json(s.lambda)},
                {"chart", s.chart == Chart::Standard ? "standard" : "conjugate"},
                {"degree_offset", s.degree_offset},
                {"punctures", punctures}};
}

ResidueShadow residue_shadow_from_json(const json& j) {
    if (!j.is_object() || !j.contains("lambda") || !j.contains("punctures")) {
        throw SchemaError("residue shadow: expected \"lambda\" and \"punctures\"");
    }
    ResidueShadow s;
    s.lambda = complex_from_json(j["lambda"], "residue shadow: lambda");
    if (j.contains("chart")) {
        if (!j["chart"].is_string()) {
            throw SchemaError("residue shadow: \"chart\" must be a string");
        }
        std::string chart = j["chart"].get<std::string>();
        if (chart == "standard") {
            s.chart = Chart::Standard;
        } else if (chart == "conjugate") {
            s.chart = Chart::Conjugate;
        } else {
            throw SchemaError("residue shadow: unknown chart \"" + chart + "\"");
        }
    }
    if (j.contains("degree_offset")) {
        if (!j["degree_offset"].is_number_integer()) {
            throw SchemaError("residue shadow: \"degree_offset\" must be an integer");
        }
        s.degree_offset = j["degree_offset"].get<long>();
    }
    if (!j["punctures"].is_array() || j["punctures"].empty()) {
        throw SchemaError("residue shadow: \"punctures\" must be a non-empty array");
    }
    for (const json& pj : j["punctures"]) {
        if (!pj.is_object() || !pj.contains("label") || !pj["label"].is_string() ||
            !pj.contains("theta") || !pj["theta"].is_array()) {
            throw SchemaError("residue shadow: punctures carry \"label\" and \"theta\"");
        }
        PunctureShadow p;
        p.label = pj["label"].get<std::string>();
        if (s.puncture_index(p.label) >= 0) {
            throw SchemaError("residue shadow: duplicate puncture label \"" + p.label +
                              "\"");
        }
        for (std::size_t i = 0; i < pj["theta"].size(); ++i) {
            p.theta.push_back(complex_from_json(
                pj["theta"][i], "residue shadow: theta[" + std::to_string(i) + "]"));
        }
        s.punctures.push_back(std::move(p));
    }
    s.rank();  // throws if ragged
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "lambda" && it.key() != "chart" && it.key() != "degree_offset" &&
            it.key() != "punctures") {
            throw SchemaError("residue shadow: unknown key \"" + it.key() + "\"");
        }
    }
    return s;
}

json betti_shadow_to_json(const BettiShadow& bs, const std::vector<std::string>& labels) {
    if (labels.size() != bs.punctures.size()) {
        throw SchemaError("betti shadow: label count does not match puncture count");
    }
    json punctures = json::array();
    for (std::size_t t = 0; t < bs.punctures.size(); ++t) {
        json slots = json::array();
        for (const BettiSlot& slot : bs.punctures[t]) {
            slots.push_back(json{{"mu", complex_to_json(slot.mu)}, {"jump", slot.jump}});
        }
        punctures.push_back(json{{"label", labels[t]}, {"slots", slots}});
    }
    return json{{"punctures", punctures}};
}

json transitions_to_json(const std::vector<Transition>& ts) {
    json out = json::array();
    for (const Transition& t : ts) {
        out.push_back(json{{"from", t.from_sample},
                           {"to", t.to_sample},
                           {"word", normal_form_to_json(t.word)}});
    }
    return out;
}

json orbit_to_json(const std::vector<OrbitEntry>& entries) {
    json out = json::array();
    for (const OrbitEntry& e : entries) {
        out.push_back(json{{"shadow", residue_shadow_to_json(e.shadow)},
                           {"witness", normal_form_to_json(e.witness)}});
    }
    return out;
}

json harmonic_shadow_to_json(const HarmonicShadow& shadow) {
    json punctures = json::array();
    for (const Puncture& p : shadow.punctures) {
        json spectrum = json::array();
        for (const KmsPoint& x : p.spectrum.points) {
            spectrum.push_back(json{{"a", x.a}, {"alpha", complex_to_json(x.alpha)}});
        }
        punctures.push_back(json{{"label", p.label}, {"spectrum", spectrum}});
    }
    json out{{"rank", shadow.rank}};
    if (shadow.genus) out["genus"] = *shadow.genus;
    out["punctures"] = punctures;
    return out;
}

void write_flow_csv(std::ostream& os, const HarmonicShadow& shadow,
                    const std::vector<cplx>& lambdas) {
    os << "re_lambda,im_lambda,puncture,kms_index,p,re_e,im_e\n";
    os << std::setprecision(12);
    for (cplx lambda : lambdas) {
        for (const Puncture& p : shadow.punctures) {
            for (std::size_t i = 0; i < p.spectrum.points.size(); ++i) {
                FlowValue v = flow(p.spectrum.points[i], lambda);
                os << lambda.real() << ',' << lambda.imag() << ',' << p.label << ','
                   << i << ',' << v.p << ',' << v.e.real() << ',' << v.e.imag() << '\n';
            }
        }
    }
}

namespace {

std::size_t skip_ws(const std::string& s, std::size_t i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

/// i points at an opening quote; returns the index just past the closing quote.
std::size_t skip_string(const std::string& s, std::size_t i) {
    ++i;
    while (i < s.size()) {
        if (s[i] == '\\') {
            i += 2;
        } else if (s[i] == '"') {
            return i + 1;
        } else {
            ++i;
        }
    }
    return std::string::npos;
}

/// i points at the first character of a JSON value; returns the index just past it.
std::size_t skip_value(const std::string& s, std::size_t i) {
    i = skip_ws(s, i);
    if (i >= s.size()) return std::string::npos;
    if (s[i] == '"') return skip_string(s, i);
    if (s[i] == '{' || s[i] == '[') {
        int depth = 0;
        while (i < s.size()) {
            if (s[i] == '"') {
                i = skip_string(s, i);
                if (i == std::string::npos) return std::string::npos;
                continue;
            }
            if (s[i] == '{' || s[i] == '[') ++depth;
            if (s[i] == '}' || s[i] == ']') {
                --depth;
                if (depth == 0) return i + 1;
            }
            ++i;
        }
        return std::string::npos;
    }
    while (i < s.size() && s[i] != ',' && s[i] != '}' && s[i] != ']' &&
           !std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
    }
    return i;
}

std::string unescape_pointer_token(const std::string& token) {
    std::string out;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '~' && i + 1 < token.size()) {
            out += (token[i + 1] == '1') ? '/' : '~';
            ++i;
        } else {
            out += token[i];
        }
    }
    return out;
}

std::string parse_string_token(const std::string& s, std::size_t i) {
    std::size_t end = skip_string(s, i);
    if (end == std::string::npos) return {};
    return s.substr(i + 1, end - i - 2);
}

}  // namespace

int line_of_pointer(const std::string& text, const std::string& pointer) {
    std::vector<std::string> segments;
    std::size_t start = 0;
    if (!pointer.empty()) {
        if (pointer[0] != '/') return 0;
        start = 1;
        while (start <= pointer.size()) {
            std::size_t slash = pointer.find('/', start);
            if (slash == std::string::npos) slash = pointer.size();
            segments.push_back(unescape_pointer_token(pointer.substr(start, slash - start)));
            start = slash + 1;
        }
    }
    std::size_t i = skip_ws(text, 0);
    for (const std::string& seg : segments) {
        if (i >= text.size()) return 0;
        if (text[i] == '{') {
            ++i;
            bool found = false;
            while (true) {
                i = skip_ws(text, i);
                if (i >= text.size() || text[i] == '}') break;
                if (text[i] != '"') return 0;
                std::string key = parse_string_token(text, i);
                i = skip_string(text, i);
                if (i == std::string::npos) return 0;
                i = skip_ws(text, i);
                if (i >= text.size() || text[i] != ':') return 0;
                i = skip_ws(text, i + 1);
                if (key == seg) {
                    found = true;
                    break;
                }
                i = skip_value(text, i);
                if (i == std::string::npos) return 0;
                i = skip_ws(text, i);
                if (i < text.size() && text[i] == ',') ++i;
            }
            if (!found) return 0;
        } else if (text[i] == '[') {
            std::size_t index = 0;
            try {
                index = std::stoul(seg);
            } catch (...) {
                return 0;
            }
            i = skip_ws(text, i + 1);
            for (std::size_t k = 0; k < index; ++k) {
                i = skip_value(text, i);
                if (i == std::string::npos) return 0;
                i = skip_ws(text, i);
                if (i >= text.size() || text[i] != ',') return 0;
                i = skip_ws(text, i + 1);
            }
        } else {
            return 0;
        }
    }
    if (i > text.size()) return 0;
    int line = 1;
    for (std::size_t k = 0; k < i && k < text.size(); ++k) {
        if (text[k] == '\n') ++line;
    }
    return line;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot read file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace specshadow
