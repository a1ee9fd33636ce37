#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specshadow/betti.hpp"
#include "specshadow/errors.hpp"
#include "specshadow/json_io.hpp"
#include "specshadow/kms.hpp"
#include "specshadow/rh.hpp"
#include "specshadow/section.hpp"
#include "specshadow/suites.hpp"
#include "specshadow/twistor.hpp"
#include "specshadow/walls.hpp"

namespace {

using namespace specshadow;

/// Everything the subcommands share. Flags win over the config file.
struct CliOptions {
    std::string config_path;
    std::string input;
    std::string output_dir = ".";
    std::string region;
    std::string path;
    std::string profile;
    std::string suite = "all";
    std::string sigma;
    std::string lambda;
    int degree = 0;
    int samples = 0;
    int max_length = 3;
    bool json = false;
    std::optional<std::uint64_t> seed;

    Config config() const {
        Config cfg;
        if (!config_path.empty()) cfg = config_from_json_file(config_path);
        if (seed) cfg.seed = *seed;
        cfg.validate();
        return cfg;
    }

    int effective_samples(const Config& cfg) const {
        if (samples > 0) {
            if (samples < 2) throw ConfigError("--samples must be at least 2");
            return samples;
        }
        return cfg.grid_resolution;
    }
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, sep)) out.push_back(piece);
    if (!text.empty() && text.back() == sep) out.push_back("");
    return out;
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("cannot parse " + what + " from \"" + text + "\"");
    }
}

long parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("cannot parse " + what + " from \"" + text + "\"");
    }
}

cplx parse_complex_pair(const std::string& text, const std::string& what) {
    std::vector<std::string> parts = split(text, ',');
    if (parts.size() != 2) {
        throw SchemaError(what + " wants \"re,im\", got \"" + text + "\"");
    }
    return {parse_real(parts[0], what), parse_real(parts[1], what)};
}

std::pair<double, double> parse_region(const std::string& text) {
    std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 2) {
        throw SchemaError("--region wants \"r_min:r_max\", got \"" + text + "\"");
    }
    double lo = parse_real(parts[0], "--region");
    double hi = parse_real(parts[1], "--region");
    if (!(0.0 < lo && lo < hi)) {
        throw SchemaError("--region wants 0 < r_min < r_max");
    }
    return {lo, hi};
}

std::vector<cplx> parse_path(const std::string& text) {
    std::vector<cplx> out;
    for (const std::string& piece : split(text, ':')) {
        out.push_back(parse_complex_pair(piece, "--path"));
    }
    if (out.empty()) throw SchemaError("--path wants at least one point");
    return out;
}

/// Endpoint-inclusive polyline sampling, junction points deduplicated.
std::vector<cplx> sample_polyline(const std::vector<cplx>& path, int per_segment) {
    std::vector<cplx> out;
    if (path.size() == 1) return path;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        for (int j = (k == 0 ? 0 : 1); j < per_segment; ++j) {
            double t = static_cast<double>(j) / (per_segment - 1);
            out.push_back(path[k] + t * (path[k + 1] - path[k]));
        }
    }
    return out;
}

MultiPermutation parse_sigma(const std::string& text) {
    MultiPermutation sigma;
    for (const std::string& piece : split(text, ';')) {
        std::vector<std::string> parts = split(piece, ':');
        if (parts.size() != 2 || parts[0].empty()) {
            throw SchemaError("--sigma wants \"label:i1,i2,...;...\", got \"" + piece +
                              "\"");
        }
        std::vector<int> images;
        for (const std::string& num : split(parts[1], ',')) {
            long v = parse_int(num, "--sigma");
            if (v < 1) throw SchemaError("--sigma images are 1-based");
            images.push_back(static_cast<int>(v - 1));
        }
        sigma[parts[0]] = std::move(images);
    }
    return sigma;
}

std::filesystem::path output_file(const CliOptions& opts, const std::string& name) {
    std::filesystem::path dir(opts.output_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SchemaError("cannot open " + path.string() + " for writing");
    os << content;
    std::cout << "wrote " << path.string() << "\n";
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_file(path, j.dump(2) + "\n");
}

HarmonicShadow load_shadow(const CliOptions& opts, const Config& cfg) {
    if (opts.input.empty()) throw SchemaError("--input is required");
    HarmonicShadow shadow = shadow_from_json_file(opts.input);
    validate_shadow(shadow, cfg);
    return shadow;
}

int cmd_flow(const CliOptions& opts) {
    Config cfg = opts.config();
    HarmonicShadow shadow = load_shadow(opts, cfg);
    std::vector<cplx> lambdas;
    if (!opts.path.empty()) {
        lambdas = sample_polyline(parse_path(opts.path), opts.effective_samples(cfg));
    } else if (!opts.lambda.empty()) {
        lambdas.push_back(parse_complex_pair(opts.lambda, "--lambda"));
    }
    std::ostringstream csv;
    write_flow_csv(csv, shadow, lambdas);
    write_file(output_file(opts, "flow.csv"), csv.str());
    if (opts.json) {
        json rows = json::array();
        for (cplx l : lambdas) {
            for (const Puncture& p : shadow.punctures) {
                for (std::size_t i = 0; i < p.spectrum.points.size(); ++i) {
                    FlowValue v = flow(p.spectrum.points[i], l);
                    rows.push_back({{"lambda", complex_to_json(l)},
                                    {"puncture", p.label},
                                    {"kms_index", i},
                                    {"p", v.p},
                                    {"e", complex_to_json(v.e)}});
                }
            }
        }
        write_json_file(output_file(opts, "flow.json"), json{{"rows", rows}});
    }
    return 0;
}

int cmd_walls(const CliOptions& opts) {
    Config cfg = opts.config();
    HarmonicShadow shadow = load_shadow(opts, cfg);
    auto [r_min, r_max] = parse_region(opts.region.empty() ? "0.1:3" : opts.region);
    int samples = opts.effective_samples(cfg);

    std::vector<DeltaPoint> delta = delta_in_region(shadow, r_min, r_max, cfg);
    std::vector<WallCurve> walls = level_walls(shadow, r_min, r_max, samples, cfg);
    std::vector<Disc> cover = build_cover(shadow, r_min, r_max, delta, cfg);

    std::ostringstream dcsv, wcsv, ccsv;
    write_delta_csv(dcsv, delta);
    write_walls_csv(wcsv, walls);
    write_cover_csv(ccsv, cover);
    write_file(output_file(opts, "delta.csv"), dcsv.str());
    write_file(output_file(opts, "walls.csv"), wcsv.str());
    write_file(output_file(opts, "cover.csv"), ccsv.str());

    if (opts.json) {
        json jdelta = json::array();
        for (const DeltaPoint& d : delta) {
            jdelta.push_back({{"lambda", complex_to_json(d.lambda)},
                              {"puncture", d.puncture},
                              {"i", d.i + 1},
                              {"j", d.j + 1},
                              {"n", d.n}});
        }
        json jwalls = json::array();
        for (const WallCurve& w : walls) {
            json pts = json::array();
            for (cplx z : w.points) pts.push_back(complex_to_json(z));
            jwalls.push_back({{"puncture", w.puncture},
                              {"i", w.i + 1},
                              {"j", w.j + 1},
                              {"m", w.m},
                              {"points", pts}});
        }
        json jcover = json::array();
        for (const Disc& d : cover) {
            jcover.push_back(
                {{"center", complex_to_json(d.center)}, {"radius", d.radius}});
        }
        write_json_file(output_file(opts, "walls.json"),
                        json{{"delta", jdelta}, {"walls", jwalls}, {"cover", jcover}});
    }
    return 0;
}

int cmd_section(const CliOptions& opts) {
    Config cfg = opts.config();
    HarmonicShadow shadow = load_shadow(opts, cfg);
    if (opts.path.empty()) throw SchemaError("--path is required");
    std::vector<cplx> corners = parse_path(opts.path);
    std::vector<cplx> path = sample_polyline(corners, opts.effective_samples(cfg));
    TraceResult trace = trace_path(shadow, path, cfg);

    std::ostringstream csv;
    write_section_csv(csv, trace);
    write_file(output_file(opts, "section.csv"), csv.str());
    if (opts.json) {
        json doc;
        doc["transitions"] = transitions_to_json(trace.transitions);
        doc["holonomy"] =
            trace.holonomy ? normal_form_to_json(*trace.holonomy) : json(nullptr);
        long nontrivial = 0;
        for (const Transition& t : trace.transitions) {
            if (!t.word.is_identity()) ++nontrivial;
        }
        doc["samples"] = trace.samples.size();
        doc["nontrivial_transitions"] = nontrivial;
        write_json_file(output_file(opts, "section.json"), doc);
    }
    return 0;
}

int cmd_orbit(const CliOptions& opts) {
    Config cfg = opts.config();
    HarmonicShadow shadow = load_shadow(opts, cfg);
    if (opts.lambda.empty()) throw SchemaError("--lambda is required");
    cplx lambda = parse_complex_pair(opts.lambda, "--lambda");
    ResidueShadow rs = to_residue_shadow(local_order(shadow, lambda, cfg));
    std::vector<OrbitEntry> entries = orbit(rs, opts.max_length, cfg);

    std::ostringstream csv;
    csv << "entry,puncture,slot,re_theta,im_theta,degree\n";
    csv.precision(12);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const ResidueShadow& s = entries[k].shadow;
        for (const PunctureShadow& p : s.punctures) {
            for (std::size_t i = 0; i < p.theta.size(); ++i) {
                csv << k << ',' << p.label << ',' << i + 1 << ',' << p.theta[i].real()
                    << ',' << p.theta[i].imag() << ',' << s.degree_offset << '\n';
            }
        }
    }
    write_file(output_file(opts, "orbit.csv"), csv.str());
    if (opts.json) {
        write_json_file(output_file(opts, "orbit.json"), orbit_to_json(entries));
    }
    return 0;
}

int cmd_betti(const CliOptions& opts) {
    Config cfg = opts.config();
    if (opts.input.empty()) throw SchemaError("--input is required");
    json doc = json::parse(read_text_file(opts.input), nullptr, true, true);

    if (doc.is_object() && doc.contains("punctures") && doc["punctures"].is_array() &&
        !doc["punctures"].empty() && doc["punctures"][0].contains("spectrum")) {
        // Harmonic shadow route: levels, jumps and monodromy at one parameter.
        HarmonicShadow shadow = load_shadow(opts, cfg);
        if (opts.lambda.empty()) {
            throw SchemaError("--lambda is required for a harmonic shadow input");
        }
        cplx lambda = parse_complex_pair(opts.lambda, "--lambda");
        ResidueShadow rs = to_residue_shadow(local_order(shadow, lambda, cfg));
        std::vector<std::vector<cplx>> thetas;
        std::vector<std::string> labels;
        for (const PunctureShadow& p : rs.punctures) {
            thetas.push_back(p.theta);
            labels.push_back(p.label);
        }
        LevelChoice levels = choose_levels(thetas, 0.0, cfg);
        BettiShadow bs = betti_shadow(rs, levels, cfg);

        std::ostringstream csv;
        csv << "puncture,slot,jump,re_mu,im_mu\n";
        csv.precision(12);
        for (std::size_t t = 0; t < bs.punctures.size(); ++t) {
            for (std::size_t j = 0; j < bs.punctures[t].size(); ++j) {
                const BettiSlot& slot = bs.punctures[t][j];
                csv << labels[t] << ',' << j + 1 << ',' << slot.jump << ','
                    << slot.mu.real() << ',' << slot.mu.imag() << '\n';
            }
        }
        write_file(output_file(opts, "betti.csv"), csv.str());
        if (opts.json) {
            write_json_file(output_file(opts, "betti.json"),
                            betti_shadow_to_json(bs, labels));
        }
        return 0;
    }

    // Filtered local system route.
    FilteredLocalSystem L = system_from_json_file(opts.input, cfg);
    EigenvalueVector ev = eigenvalue_map(L, cfg);
    int commutant = commutant_dimension(L, cfg);
    double surgery_distance = -1.0;
    if (!opts.sigma.empty()) {
        MultiPermutation sigma = parse_sigma(opts.sigma);
        FilteredLocalSystem lr = flag_surgery(sigma, L, cfg, SwapOrder::LeftToRight);
        FilteredLocalSystem rl = flag_surgery(sigma, L, cfg, SwapOrder::RightToLeft);
        surgery_distance = system_flag_distance(lr, rl);
        ev = eigenvalue_map(lr, cfg);
    }

    std::ostringstream csv;
    csv << "puncture,slot,re_alpha,im_alpha\n";
    csv.precision(12);
    for (std::size_t t = 0; t < ev.labels.size(); ++t) {
        for (std::size_t j = 0; j < ev.alphas[t].size(); ++j) {
            csv << ev.labels[t] << ',' << j + 1 << ',' << ev.alphas[t][j].real() << ','
                << ev.alphas[t][j].imag() << '\n';
        }
    }
    write_file(output_file(opts, "betti.csv"), csv.str());
    if (opts.json) {
        json jev;
        for (std::size_t t = 0; t < ev.labels.size(); ++t) {
            json slots = json::array();
            for (cplx alpha : ev.alphas[t]) slots.push_back(complex_to_json(alpha));
            jev[ev.labels[t]] = slots;
        }
        json out{{"eigenvalues", jev}, {"commutant_dimension", commutant}};
        if (surgery_distance >= 0.0) out["surgery_order_distance"] = surgery_distance;
        write_json_file(output_file(opts, "betti.json"), out);
    }
    std::cout << "commutant dimension " << commutant << "\n";
    if (surgery_distance >= 0.0) {
        std::cout << "surgery order distance " << surgery_distance << "\n";
    }
    return 0;
}

int cmd_twistor(const CliOptions& opts) {
    Config cfg = opts.config();
    (void)cfg;
    if (opts.profile.empty()) throw SchemaError("--profile is required");
    std::vector<std::string> parts = split(opts.profile, ',');
    if (parts.size() != 3) {
        throw SchemaError("--profile wants \"n0,n1,n2\", got \"" + opts.profile + "\"");
    }
    WeightProfile profile{static_cast<int>(parse_int(parts[0], "--profile")),
                          static_cast<int>(parse_int(parts[1], "--profile")),
                          static_cast<int>(parse_int(parts[2], "--profile"))};
    SymReport report = sym_check(profile, opts.degree);

    std::ostringstream csv;
    csv << "weight,count\n";
    for (const auto& [k, count] : report.table.entries) {
        csv << k << ',' << count << '\n';
    }
    write_file(output_file(opts, "twistor.csv"), csv.str());
    std::map<int, long long> weights(report.table.entries.begin(),
                                     report.table.entries.end());
    long long h0 = twistor_h0(weights);
    if (opts.json) {
        json entries;
        for (const auto& [k, count] : report.table.entries) {
            entries[std::to_string(k)] = count;
        }
        write_json_file(output_file(opts, "twistor.json"),
                        json{{"degree", opts.degree},
                             {"entries", entries},
                             {"h0", h0},
                             {"enumeration_agrees", report.pass}});
    }
    std::cout << "h0 " << h0 << (report.pass ? "" : " (enumeration mismatch!)") << "\n";
    return report.pass ? 0 : 1;
}

int cmd_check(const CliOptions& opts) {
    Config cfg = opts.config();
    std::vector<std::string> wanted;
    if (opts.suite == "all") {
        wanted = suite_names();
    } else {
        wanted = split(opts.suite, ',');
    }
    json report;
    report["seed"] = cfg.seed;
    report["suites"] = json::array();
    bool all_pass = true;
    for (const std::string& name : wanted) {
        SuiteResult result = run_suite(name, cfg);
        json failures = json::array();
        for (const std::string& f : result.failures) failures.push_back(f);
        report["suites"].push_back({{"name", result.name},
                                    {"pass", result.pass},
                                    {"checks", result.checks},
                                    {"failures", failures}});
        all_pass = all_pass && result.pass;
    }
    report["pass"] = all_pass;
    std::cout << report.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral shadow toolkit: flows, walls, sections, gauge words"};
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--config", opts.config_path, "JSON config file (flags win)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", opts.input, "input JSON document");
        sub->add_option("--output-dir", opts.output_dir, "directory for emitted files");
        sub->add_flag("--json", opts.json, "also emit machine-readable JSON");
        sub->add_option("--seed", opts.seed, "seed override for randomized suites");
    };

    CLI::App* flow = app.add_subcommand("flow", "transport the spectrum along lambdas");
    add_common(flow);
    flow->add_option("--path", opts.path, "polyline x0,y0:x1,y1:... to sample");
    flow->add_option("--lambda", opts.lambda, "single parameter value re,im");
    flow->add_option("--samples", opts.samples, "points per polyline segment");

    CLI::App* walls = app.add_subcommand("walls", "collision points, level walls, cover");
    add_common(walls);
    walls->add_option("--region", opts.region, "annulus r_min:r_max (default 0.1:3)");
    walls->add_option("--samples", opts.samples, "points per wall segment");

    CLI::App* section = app.add_subcommand("section", "trace the preferred section");
    add_common(section);
    section->add_option("--path", opts.path, "polyline x0,y0:x1,y1:... to trace");
    section->add_option("--samples", opts.samples, "points per polyline segment");

    CLI::App* orbit = app.add_subcommand("orbit", "enumerate short gauge-word images");
    add_common(orbit);
    orbit->add_option("--lambda", opts.lambda, "parameter value re,im");
    orbit->add_option("--max-length", opts.max_length, "word length bound")
        ->check(CLI::Range(0, 6));

    CLI::App* betti = app.add_subcommand(
        "betti", "jumps and monodromy of a shadow, or flags of a local system");
    add_common(betti);
    betti->add_option("--lambda", opts.lambda, "parameter value re,im (shadow route)");
    betti->add_option("--sigma", opts.sigma,
                      "rearrangement label:i1,i2,...;... (1-based images)");

    CLI::App* twistor = app.add_subcommand("twistor", "weight tables of twistor gradings");
    add_common(twistor);
    twistor->add_option("--profile", opts.profile, "graded dimensions n0,n1,n2");
    twistor->add_option("--degree", opts.degree, "symmetric power degree")
        ->check(CLI::Range(0, 64));

    CLI::App* check = app.add_subcommand("check", "run the invariant suites");
    add_common(check);
    check->add_option("--suite", opts.suite, "suite name, list, or \"all\"");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (flow->parsed()) return cmd_flow(opts);
        if (walls->parsed()) return cmd_walls(opts);
        if (section->parsed()) return cmd_section(opts);
        if (orbit->parsed()) return cmd_orbit(opts);
        if (betti->parsed()) return cmd_betti(opts);
        if (twistor->parsed()) return cmd_twistor(opts);
        if (check->parsed()) return cmd_check(opts);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 3;
    } catch (const FlagNotInvariant& e) {
        std::cerr << "flag not invariant: " << e.what() << "\n";
        return 3;
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "degeneracy: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
