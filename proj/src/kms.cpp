#include "specshadow/kms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "specshadow/errors.hpp"
#include "specshadow/json_io.hpp"

namespace specshadow {

int HarmonicShadow::puncture_index(const std::string& label) const {
    for (std::size_t t = 0; t < punctures.size(); ++t) {
        if (punctures[t].label == label) return static_cast<int>(t);
    }
    return -1;
}

FlowValue flow(const KmsPoint& x, cplx lambda) {
    FlowValue v;
    v.p = x.a + 2.0 * std::real(lambda * std::conj(x.alpha));
    v.e = x.alpha - x.a * lambda + std::conj(x.alpha) * lambda * lambda;
    return v;
}

KmsPoint lattice_shift(const KmsPoint& x, int k) {
    return {x.a + static_cast<double>(k), x.alpha};
}

int window_shift(double p, double anchor) {
    double k = std::ceil(anchor - 1.0 - p);
    // ceil can land one off at the interval endpoints; nudge into (anchor-1, anchor].
    while (p + k <= anchor - 1.0) k += 1.0;
    while (p + k > anchor) k -= 1.0;
    return static_cast<int>(k);
}

namespace {

/// Distance of x from the nearest integer, i.e. |x mod 1| reduced to [0, 0.5].
double dist_to_integer(double x) { return std::abs(std::remainder(x, 1.0)); }

}  // namespace

ValidationReport validate_spectrum(const KmsSpectrum& s, const Config& cfg) {
    cfg.validate();
    ValidationReport report;
    auto add = [&](SpectrumViolation v) {
        report.ok = false;
        report.violations.push_back(std::move(v));
    };
    if (static_cast<int>(s.points.size()) != s.rank) {
        add({SpectrumViolation::Kind::NonFinite, -1, -1,
             "spectrum size does not match rank"});
        return report;
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const KmsPoint& x = s.points[i];
        if (!std::isfinite(x.a) || !std::isfinite(x.alpha.real()) ||
            !std::isfinite(x.alpha.imag())) {
            std::ostringstream msg;
            msg << "spectrum point " << i + 1 << " has a non-finite entry";
            add({SpectrumViolation::Kind::NonFinite, static_cast<int>(i), -1, msg.str()});
            continue;
        }
        if (!(x.a > -1.0 && x.a <= 0.0)) {
            std::ostringstream msg;
            msg << "level representative " << x.a << " of spectrum point " << i + 1
                << " is outside (-1, 0]";
            add({SpectrumViolation::Kind::LevelOutOfRange, static_cast<int>(i), -1,
                 msg.str()});
        }
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        for (std::size_t j = i + 1; j < s.points.size(); ++j) {
            const KmsPoint& x = s.points[i];
            const KmsPoint& y = s.points[j];
            bool same_level = dist_to_integer(x.a - y.a) <= cfg.eps_eq;
            bool same_alpha = std::abs(x.alpha - y.alpha) <= cfg.eps_eq;
            if (same_level && same_alpha) {
                std::ostringstream msg;
                msg << "spectrum points " << i + 1 << " and " << j + 1
                    << " coincide in (R/Z) x C";
                add({SpectrumViolation::Kind::Duplicate, static_cast<int>(i),
                     static_cast<int>(j), msg.str()});
            }
        }
    }
    return report;
}

std::vector<std::vector<int>> valid_orderings(
    const std::vector<std::pair<double, cplx>>& pairs, const Config& cfg) {
    cfg.validate();
    const int n = static_cast<int>(pairs.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (int s = 0; s < n && ok; ++s) {
            for (int t = s + 1; t < n && ok; ++t) {
                int u = perm[s];
                int v = perm[t];
                if (std::abs(pairs[u].second - pairs[v].second) <= cfg.eps_eq &&
                    pairs[u].first >= pairs[v].first - cfg.eps_eq) {
                    ok = false;
                }
            }
        }
        if (ok) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& source, const std::string& text,
                              const std::string& pointer, const std::string& what) {
    int line = line_of_pointer(text, pointer);
    std::ostringstream msg;
    msg << source;
    if (line > 0) msg << ":" << line;
    msg << ": " << what;
    throw SchemaError(msg.str());
}

double number_at(const json& j, const std::string& source, const std::string& text,
                 const std::string& pointer) {
    if (!j.is_number()) {
        schema_fail(source, text, pointer, "expected a number");
    }
    return j.get<double>();
}

}  // namespace

HarmonicShadow shadow_from_json_text(const std::string& text,
                                     const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(source_name + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) {
        schema_fail(source_name, text, "", "top level must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key != "rank" && key != "genus" && key != "punctures") {
            schema_fail(source_name, text, "/" + key, "unknown key \"" + key + "\"");
        }
    }
    HarmonicShadow shadow;
    if (!j.contains("rank") || !j["rank"].is_number_integer()) {
        schema_fail(source_name, text, "/rank", "\"rank\" must be an integer");
    }
    shadow.rank = j["rank"].get<int>();
    if (shadow.rank < 1) {
        schema_fail(source_name, text, "/rank", "\"rank\" must be at least 1");
    }
    if (j.contains("genus")) {
        if (!j["genus"].is_number_integer() || j["genus"].get<int>() < 0) {
            schema_fail(source_name, text, "/genus",
                        "\"genus\" must be a non-negative integer");
        }
        shadow.genus = j["genus"].get<int>();
    }
    if (!j.contains("punctures") || !j["punctures"].is_array() || j["punctures"].empty()) {
        schema_fail(source_name, text, "/punctures",
                    "\"punctures\" must be a non-empty array");
    }
    for (std::size_t t = 0; t < j["punctures"].size(); ++t) {
        std::string base = "/punctures/" + std::to_string(t);
        const json& pj = j["punctures"][t];
        if (!pj.is_object()) {
            schema_fail(source_name, text, base, "puncture must be an object");
        }
        for (auto it = pj.begin(); it != pj.end(); ++it) {
            if (it.key() != "label" && it.key() != "spectrum") {
                schema_fail(source_name, text, base + "/" + it.key(),
                            "unknown key \"" + it.key() + "\"");
            }
        }
        Puncture p;
        if (!pj.contains("label") || !pj["label"].is_string() ||
            pj["label"].get<std::string>().empty()) {
            schema_fail(source_name, text, base + "/label",
                        "\"label\" must be a non-empty string");
        }
        p.label = pj["label"].get<std::string>();
        if (shadow.puncture_index(p.label) >= 0) {
            schema_fail(source_name, text, base + "/label",
                        "duplicate puncture label \"" + p.label + "\"");
        }
        if (!pj.contains("spectrum") || !pj["spectrum"].is_array()) {
            schema_fail(source_name, text, base + "/spectrum",
                        "\"spectrum\" must be an array");
        }
        if (static_cast<int>(pj["spectrum"].size()) != shadow.rank) {
            schema_fail(source_name, text, base + "/spectrum",
                        "spectrum must have exactly rank entries");
        }
        p.spectrum.rank = shadow.rank;
        for (std::size_t i = 0; i < pj["spectrum"].size(); ++i) {
            std::string sbase = base + "/spectrum/" + std::to_string(i);
            const json& xj = pj["spectrum"][i];
            if (!xj.is_object()) {
                schema_fail(source_name, text, sbase, "spectrum entry must be an object");
            }
            for (auto it = xj.begin(); it != xj.end(); ++it) {
                if (it.key() != "a" && it.key() != "alpha") {
                    schema_fail(source_name, text, sbase + "/" + it.key(),
                                "unknown key \"" + it.key() + "\"");
                }
            }
            if (!xj.contains("a")) {
                schema_fail(source_name, text, sbase, "missing key \"a\"");
            }
            KmsPoint x;
            x.a = number_at(xj["a"], source_name, text, sbase + "/a");
            if (!xj.contains("alpha") || !xj["alpha"].is_array() ||
                xj["alpha"].size() != 2) {
                schema_fail(source_name, text, sbase + "/alpha",
                            "\"alpha\" must be a [re, im] pair");
            }
            x.alpha = cplx(number_at(xj["alpha"][0], source_name, text, sbase + "/alpha/0"),
                           number_at(xj["alpha"][1], source_name, text, sbase + "/alpha/1"));
            p.spectrum.points.push_back(x);
        }
        shadow.punctures.push_back(std::move(p));
    }
    return shadow;
}

HarmonicShadow shadow_from_json_file(const std::string& path) {
    return shadow_from_json_text(read_text_file(path), path);
}

void validate_shadow(const HarmonicShadow& shadow, const Config& cfg) {
    for (const Puncture& p : shadow.punctures) {
        ValidationReport report = validate_spectrum(p.spectrum, cfg);
        for (const SpectrumViolation& v : report.violations) {
            std::string msg = "puncture \"" + p.label + "\": " + v.message;
            if (v.kind == SpectrumViolation::Kind::Duplicate) {
                throw HypothesisViolation(msg);
            }
            throw SchemaError(msg);
        }
    }
}

}  // namespace specshadow
