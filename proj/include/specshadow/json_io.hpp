#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specshadow/groupoid.hpp"
#include "specshadow/kms.hpp"
#include "specshadow/rh.hpp"
#include "specshadow/section.hpp"

namespace specshadow {

using json = nlohmann::ordered_json;

json complex_to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& where);

/// {"punctures": {label: {"sigma": [...], "m": [...]}}, "degree": d,
///  "domain": [[label, i, j, c], ...]} with 1-based slot indices on the wire.
json normal_form_to_json(const NormalForm& nf);
NormalForm normal_form_from_json(const json& j);

json residue_shadow_to_json(const ResidueShadow& s);
ResidueShadow residue_shadow_from_json(const json& j);

json betti_shadow_to_json(const BettiShadow& bs,
                          const std::vector<std::string>& labels);

json transitions_to_json(const std::vector<Transition>& ts);

json orbit_to_json(const std::vector<OrbitEntry>& entries);

json harmonic_shadow_to_json(const HarmonicShadow& shadow);

/// Flow CSV: one row per (sample, puncture, spectrum element) with raw
/// transported values.
void write_flow_csv(std::ostream& os, const HarmonicShadow& shadow,
                    const std::vector<cplx>& lambdas);

/// Best-effort 1-based line of the value a JSON pointer ("/a/0/b") refers to
/// in raw text; returns 0 when it cannot be located.
int line_of_pointer(const std::string& text, const std::string& pointer);

/// Reads a whole file; throws SchemaError if unreadable.
std::string read_text_file(const std::string& path);

}  // namespace specshadow
