// Python bindings for the main operations: flow, walls and covers, the gauge
// groupoid, preferred sections, Betti data, twistor weights and the check
// suites. Wire formats go through JSON text; matrices go through NumPy.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "specshadow/betti.hpp"
#include "specshadow/config.hpp"
#include "specshadow/errors.hpp"
#include "specshadow/groupoid.hpp"
#include "specshadow/json_io.hpp"
#include "specshadow/kms.hpp"
#include "specshadow/rh.hpp"
#include "specshadow/section.hpp"
#include "specshadow/suites.hpp"
#include "specshadow/twistor.hpp"
#include "specshadow/walls.hpp"

namespace py = pybind11;
using namespace specshadow;

PYBIND11_MODULE(specshadow, m) {
    m.doc() = "Spectral shadows: KMS flow, wall loci, gauge groupoid, "
              "preferred sections, Betti data and twistor weights";

    auto error = py::register_exception<Error>(m, "Error");
    auto schema = py::register_exception<SchemaError>(m, "SchemaError", error);
    py::register_exception<ConfigError>(m, "ConfigError", schema);
    py::register_exception<HypothesisViolation>(m, "HypothesisViolation", error);
    py::register_exception<DomainViolation>(m, "DomainViolation", error);
    py::register_exception<LambdaZero>(m, "LambdaZero", error);
    py::register_exception<OrderingAmbiguous>(m, "OrderingAmbiguous", error);
    py::register_exception<InfeasibleBall>(m, "InfeasibleBall", error);
    py::register_exception<CoverFailure>(m, "CoverFailure", error);
    py::register_exception<PathThroughWall>(m, "PathThroughWall", error);
    py::register_exception<DegenerateFamily>(m, "DegenerateFamily", error);
    py::register_exception<NegativeWeight>(m, "NegativeWeight", error);
    py::register_exception<FlagNotInvariant>(m, "FlagNotInvariant", error);

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def_readwrite("eps_eq", &Config::eps_eq)
        .def_readwrite("eps_root", &Config::eps_root)
        .def_readwrite("eps_flag", &Config::eps_flag)
        .def_readwrite("eps_rel", &Config::eps_rel)
        .def_readwrite("window_anchor", &Config::window_anchor)
        .def_readwrite("grid_resolution", &Config::grid_resolution)
        .def_readwrite("seed", &Config::seed)
        .def("validate", &Config::validate);
    m.def("config_from_json_text", &config_from_json_text, py::arg("text"));
    m.def("config_from_json_file", &config_from_json_file, py::arg("path"));

    // ---- flow ---------------------------------------------------------

    py::class_<KmsPoint>(m, "KmsPoint")
        .def(py::init<>())
        .def(py::init([](double a, cplx alpha) {
                 return KmsPoint{a, alpha};
             }),
             py::arg("a"), py::arg("alpha"))
        .def_readwrite("a", &KmsPoint::a)
        .def_readwrite("alpha", &KmsPoint::alpha);
    py::class_<FlowValue>(m, "FlowValue")
        .def_readwrite("p", &FlowValue::p)
        .def_readwrite("e", &FlowValue::e);
    m.def("flow", &flow, py::arg("x"), py::arg("lam"));
    m.def("lattice_shift", &lattice_shift, py::arg("x"), py::arg("k"));
    m.def("window_shift", &window_shift, py::arg("p"), py::arg("anchor") = 0.0);

    py::class_<KmsSpectrum>(m, "KmsSpectrum")
        .def(py::init<>())
        .def_readwrite("rank", &KmsSpectrum::rank)
        .def_readwrite("points", &KmsSpectrum::points);
    py::class_<Puncture>(m, "Puncture")
        .def(py::init<>())
        .def_readwrite("label", &Puncture::label)
        .def_readwrite("spectrum", &Puncture::spectrum);
    py::class_<HarmonicShadow>(m, "HarmonicShadow")
        .def(py::init<>())
        .def_readwrite("rank", &HarmonicShadow::rank)
        .def_readwrite("genus", &HarmonicShadow::genus)
        .def_readwrite("punctures", &HarmonicShadow::punctures)
        .def("puncture_index", &HarmonicShadow::puncture_index, py::arg("label"))
        .def("to_json", [](const HarmonicShadow& s) {
            return harmonic_shadow_to_json(s).dump(2);
        });
    m.def("shadow_from_json_text", &shadow_from_json_text, py::arg("text"),
          py::arg("source_name") = "<input>");
    m.def("shadow_from_json_file", &shadow_from_json_file, py::arg("path"));
    m.def(
        "flow_csv",
        [](const HarmonicShadow& shadow, const std::vector<cplx>& lambdas) {
            std::ostringstream os;
            write_flow_csv(os, shadow, lambdas);
            return os.str();
        },
        py::arg("shadow"), py::arg("lambdas"));

    // ---- walls and covers ----------------------------------------------

    py::class_<CollisionCoeffs>(m, "CollisionCoeffs")
        .def_readwrite("A", &CollisionCoeffs::A)
        .def_readwrite("B", &CollisionCoeffs::B)
        .def_readwrite("C", &CollisionCoeffs::C)
        .def("eval", &CollisionCoeffs::eval, py::arg("lam"));
    m.def("collision_function", &collision_function, py::arg("x"), py::arg("y"));

    py::class_<DeltaPoint>(m, "DeltaPoint")
        .def_readwrite("lam", &DeltaPoint::lambda)
        .def_readwrite("puncture", &DeltaPoint::puncture)
        .def_readwrite("i", &DeltaPoint::i)
        .def_readwrite("j", &DeltaPoint::j)
        .def_readwrite("n", &DeltaPoint::n)
        .def("__repr__", [](const DeltaPoint& d) {
            std::ostringstream os;
            os << "DeltaPoint(lam=(" << d.lambda.real() << ", " << d.lambda.imag()
               << "), puncture='" << d.puncture << "', i=" << d.i << ", j=" << d.j
               << ", n=" << d.n << ")";
            return os.str();
        });
    m.def("delta_in_region", &delta_in_region, py::arg("shadow"), py::arg("r_min"),
          py::arg("r_max"), py::arg("cfg") = Config{});

    py::class_<Disc>(m, "Disc")
        .def(py::init<>())
        .def(py::init([](cplx center, double radius) {
                 return Disc{center, radius};
             }),
             py::arg("center"), py::arg("radius"))
        .def_readwrite("center", &Disc::center)
        .def_readwrite("radius", &Disc::radius)
        .def("contains", &Disc::contains, py::arg("z"));
    m.def("build_cover", &build_cover, py::arg("shadow"), py::arg("r_min"),
          py::arg("r_max"), py::arg("delta"), py::arg("cfg") = Config{});

    // ---- gauge groupoid --------------------------------------------------

    py::enum_<Chart>(m, "Chart")
        .value("Standard", Chart::Standard)
        .value("Conjugate", Chart::Conjugate);
    py::class_<PunctureShadow>(m, "PunctureShadow")
        .def(py::init<>())
        .def_readwrite("label", &PunctureShadow::label)
        .def_readwrite("theta", &PunctureShadow::theta);
    py::class_<ResidueShadow>(m, "ResidueShadow")
        .def(py::init<>())
        .def_readwrite("lam", &ResidueShadow::lambda)
        .def_readwrite("punctures", &ResidueShadow::punctures)
        .def_readwrite("degree_offset", &ResidueShadow::degree_offset)
        .def_readwrite("chart", &ResidueShadow::chart)
        .def("puncture_index", &ResidueShadow::puncture_index, py::arg("label"))
        .def("rank", &ResidueShadow::rank)
        .def("to_json",
             [](const ResidueShadow& s) { return residue_shadow_to_json(s).dump(2); })
        .def("__repr__", [](const ResidueShadow& s) {
            return "ResidueShadow(" + residue_shadow_to_json(s).dump() + ")";
        });
    m.def("residue_shadow_from_json_text", [](const std::string& text) {
        return residue_shadow_from_json(json::parse(text));
    });
    m.def("shadows_equal", &shadows_equal, py::arg("s1"), py::arg("s2"),
          py::arg("eps"));

    py::enum_<GenKind>(m, "GenKind")
        .value("H", GenKind::H)
        .value("T", GenKind::T)
        .value("U", GenKind::U);
    py::class_<Generator>(m, "Generator")
        .def(py::init<>())
        .def(py::init([](GenKind kind, std::string puncture, int slot) {
                 return Generator{kind, std::move(puncture), slot};
             }),
             py::arg("kind"), py::arg("puncture"), py::arg("slot") = 1)
        .def_readwrite("kind", &Generator::kind)
        .def_readwrite("puncture", &Generator::puncture)
        .def_readwrite("slot", &Generator::slot);
    py::class_<Factor>(m, "Factor")
        .def(py::init<>())
        .def(py::init([](Generator gen, bool inverse) {
                 return Factor{std::move(gen), inverse};
             }),
             py::arg("gen"), py::arg("inverse") = false)
        .def_readwrite("gen", &Factor::gen)
        .def_readwrite("inverse", &Factor::inverse);
    py::class_<GroupoidWord>(m, "GroupoidWord")
        .def(py::init<>())
        .def(py::init<std::vector<Factor>>(), py::arg("factors_in_application_order"))
        .def_static("parse", &GroupoidWord::parse, py::arg("text"))
        .def("str", &GroupoidWord::str)
        .def("__str__", &GroupoidWord::str)
        .def("__repr__",
             [](const GroupoidWord& w) { return "GroupoidWord(\"" + w.str() + "\")"; })
        .def("factors", &GroupoidWord::factors, py::return_value_policy::copy)
        .def("size", &GroupoidWord::size)
        .def("empty", &GroupoidWord::empty)
        .def("push", &GroupoidWord::push, py::arg("factor"))
        .def("append", &GroupoidWord::append, py::arg("word"))
        .def("inverse", &GroupoidWord::inverse);

    py::class_<DomainConstraint>(m, "DomainConstraint")
        .def(py::init<>())
        .def(py::init([](int i, int j, long c) {
                 return DomainConstraint{i, j, c};
             }),
             py::arg("i"), py::arg("j"), py::arg("c"))
        .def_readwrite("i", &DomainConstraint::i)
        .def_readwrite("j", &DomainConstraint::j)
        .def_readwrite("c", &DomainConstraint::c);
    py::class_<PunctureAction>(m, "PunctureAction")
        .def_readwrite("sigma", &PunctureAction::sigma)
        .def_readwrite("m", &PunctureAction::m)
        .def_readwrite("domain", &PunctureAction::domain);
    py::class_<NormalForm>(m, "NormalForm")
        .def(py::init<>())
        .def_static("identity", &NormalForm::identity, py::arg("rank"),
                    py::arg("punctures"))
        .def("then", &NormalForm::then, py::arg("next"))
        .def("inverse", &NormalForm::inverse)
        .def("same_action", &NormalForm::same_action, py::arg("other"))
        .def("is_identity", &NormalForm::is_identity)
        .def("in_domain", &NormalForm::in_domain, py::arg("s"),
             py::arg("cfg") = Config{})
        .def("apply", &NormalForm::apply, py::arg("s"), py::arg("cfg") = Config{})
        .def("degree", &NormalForm::degree)
        .def("actions", &NormalForm::actions, py::return_value_policy::copy)
        .def("action",
             [](const NormalForm& nf, const std::string& label) {
                 return nf.action(label);
             },
             py::arg("label"))
        .def("to_json",
             [](const NormalForm& nf) { return normal_form_to_json(nf).dump(2); })
        .def("__repr__", [](const NormalForm& nf) {
            return "NormalForm(" + normal_form_to_json(nf).dump() + ")";
        });
    m.def("normal_form_from_json_text", [](const std::string& text) {
        return normal_form_from_json(json::parse(text));
    });

    m.def("apply_generator", &apply_generator, py::arg("g"), py::arg("s"),
          py::arg("cfg") = Config{}, py::arg("inverse") = false);
    m.def("apply_word", &apply_word, py::arg("w"), py::arg("s"),
          py::arg("cfg") = Config{});
    m.def("normal_form", &normal_form, py::arg("w"), py::arg("rank"),
          py::arg("punctures"));
    m.def("words_agree_at", &words_agree_at, py::arg("w1"), py::arg("w2"),
          py::arg("s"), py::arg("cfg") = Config{});
    m.def("deligne_normalize", &deligne_normalize, py::arg("s"),
          py::arg("cfg") = Config{});

    py::class_<OrbitEntry>(m, "OrbitEntry")
        .def_readwrite("shadow", &OrbitEntry::shadow)
        .def_readwrite("witness", &OrbitEntry::witness);
    m.def("orbit", &orbit, py::arg("s"), py::arg("max_word_length"),
          py::arg("cfg") = Config{});

    // ---- preferred sections ----------------------------------------------

    py::class_<SectionSlot>(m, "SectionSlot")
        .def_readwrite("kms_index", &SectionSlot::kms_index)
        .def_readwrite("rep_shift", &SectionSlot::rep_shift)
        .def_readwrite("p", &SectionSlot::p)
        .def_readwrite("e", &SectionSlot::e);
    py::class_<SectionPuncture>(m, "SectionPuncture")
        .def_readwrite("label", &SectionPuncture::label)
        .def_readwrite("slots", &SectionPuncture::slots);
    py::class_<SectionSample>(m, "SectionSample")
        .def_readwrite("lam", &SectionSample::lambda)
        .def_readwrite("punctures", &SectionSample::punctures);
    m.def("local_order", &local_order, py::arg("shadow"), py::arg("lam"),
          py::arg("cfg") = Config{});
    m.def("evaluate_section", &evaluate_section, py::arg("shadow"),
          py::arg("anchored"), py::arg("lam"));
    m.def("to_residue_shadow", &to_residue_shadow, py::arg("sample"));

    py::class_<Transition>(m, "Transition")
        .def_readwrite("from_sample", &Transition::from_sample)
        .def_readwrite("to_sample", &Transition::to_sample)
        .def_readwrite("word", &Transition::word);
    m.def("transition", &transition, py::arg("s1"), py::arg("s2"),
          py::arg("cfg") = Config{});

    py::class_<TraceResult>(m, "TraceResult")
        .def_readwrite("samples", &TraceResult::samples)
        .def_readwrite("transitions", &TraceResult::transitions)
        .def_readwrite("holonomy", &TraceResult::holonomy);
    m.def("trace_path", &trace_path, py::arg("shadow"), py::arg("path"),
          py::arg("cfg") = Config{}, py::arg("eps_path") = 1e-3);
    m.def(
        "section_csv",
        [](const TraceResult& trace) {
            std::ostringstream os;
            write_section_csv(os, trace);
            return os.str();
        },
        py::arg("trace"));

    py::class_<CocycleReport>(m, "CocycleReport")
        .def_readwrite("pass_", &CocycleReport::pass)
        .def_readwrite("discs", &CocycleReport::discs)
        .def_readwrite("overlaps", &CocycleReport::overlaps)
        .def_readwrite("triples", &CocycleReport::triples)
        .def_readwrite("failures", &CocycleReport::failures);
    m.def("cocycle_check", &cocycle_check, py::arg("shadow"), py::arg("cover"),
          py::arg("cfg") = Config{});

    py::class_<GlueReport>(m, "GlueReport")
        .def_readwrite("pass_", &GlueReport::pass)
        .def_readwrite("max_mono_dev", &GlueReport::max_mono_dev)
        .def_readwrite("max_jump_dev", &GlueReport::max_jump_dev)
        .def_readwrite("detail", &GlueReport::detail);
    m.def("glue_infinity", &glue_infinity, py::arg("shadow"), py::arg("lam"),
          py::arg("cfg") = Config{});

    // ---- Betti side --------------------------------------------------------

    py::class_<LevelChoice>(m, "LevelChoice")
        .def(py::init<>())
        .def_readwrite("b", &LevelChoice::b);
    py::class_<BettiSlot>(m, "BettiSlot")
        .def_readwrite("mu", &BettiSlot::mu)
        .def_readwrite("jump", &BettiSlot::jump);
    py::class_<BettiShadow>(m, "BettiShadow")
        .def_readwrite("punctures", &BettiShadow::punctures);
    m.def("choose_levels", &choose_levels, py::arg("thetas"), py::arg("ball_radius"),
          py::arg("cfg") = Config{});
    m.def("real_jumps", &real_jumps, py::arg("b"), py::arg("thetas"));
    m.def("monodromy_shadow", &monodromy_shadow, py::arg("theta"), py::arg("lam"));
    m.def("betti_shadow", &betti_shadow, py::arg("s"), py::arg("b"),
          py::arg("cfg") = Config{});
    m.def("conjugate_shadow", &conjugate_shadow, py::arg("s"));

    py::class_<BettiPuncture>(m, "BettiPuncture")
        .def(py::init<>())
        .def_readwrite("label", &BettiPuncture::label)
        .def_readwrite("gamma", &BettiPuncture::gamma)
        .def_readwrite("flag", &BettiPuncture::flag);
    py::class_<FilteredLocalSystem>(m, "FilteredLocalSystem")
        .def(py::init<>())
        .def_readwrite("rank", &FilteredLocalSystem::rank)
        .def_readwrite("genus", &FilteredLocalSystem::genus)
        .def_readwrite("a", &FilteredLocalSystem::a)
        .def_readwrite("b", &FilteredLocalSystem::b)
        .def_readwrite("punctures", &FilteredLocalSystem::punctures)
        .def_readwrite("framing", &FilteredLocalSystem::framing)
        .def("puncture_index", &FilteredLocalSystem::puncture_index,
             py::arg("label"));
    py::class_<EigenvalueVector>(m, "EigenvalueVector")
        .def_readwrite("labels", &EigenvalueVector::labels)
        .def_readwrite("alphas", &EigenvalueVector::alphas);
    py::enum_<SwapOrder>(m, "SwapOrder")
        .value("LeftToRight", SwapOrder::LeftToRight)
        .value("RightToLeft", SwapOrder::RightToLeft);
    m.def("validate_system", &validate_system, py::arg("L"), py::arg("cfg") = Config{});
    m.def("eigenvalue_map", &eigenvalue_map, py::arg("L"), py::arg("cfg") = Config{});
    m.def("in_domain", &in_domain, py::arg("sigma"), py::arg("ev"),
          py::arg("cfg") = Config{});
    m.def("flag_surgery", &flag_surgery, py::arg("sigma"), py::arg("L"),
          py::arg("cfg") = Config{}, py::arg("order") = SwapOrder::LeftToRight);
    m.def("commutant_dimension", &commutant_dimension, py::arg("L"),
          py::arg("cfg") = Config{});
    m.def("flag_distance", &flag_distance, py::arg("flag1"), py::arg("flag2"));
    m.def("system_flag_distance", &system_flag_distance, py::arg("L1"), py::arg("L2"));
    py::class_<ComposeReport>(m, "ComposeReport")
        .def_readwrite("pass_", &ComposeReport::pass)
        .def_readwrite("max_angle", &ComposeReport::max_angle)
        .def_readwrite("detail", &ComposeReport::detail);
    m.def("compose_check", &compose_check, py::arg("tau"), py::arg("sigma"),
          py::arg("L"), py::arg("cfg") = Config{});
    m.def("system_from_json_text", &system_from_json_text, py::arg("text"),
          py::arg("source_name") = "<input>", py::arg("cfg") = Config{});
    m.def("system_from_json_file", &system_from_json_file, py::arg("path"),
          py::arg("cfg") = Config{});

    // ---- twistor weights -----------------------------------------------

    py::class_<WeightProfile>(m, "WeightProfile")
        .def(py::init<>())
        .def(py::init([](int n0, int n1, int n2) {
                 return WeightProfile{n0, n1, n2};
             }),
             py::arg("n0"), py::arg("n1"), py::arg("n2"))
        .def_readwrite("n0", &WeightProfile::n0)
        .def_readwrite("n1", &WeightProfile::n1)
        .def_readwrite("n2", &WeightProfile::n2);
    py::class_<WeightTable>(m, "WeightTable")
        .def_readwrite("degree", &WeightTable::degree)
        .def_readwrite("entries", &WeightTable::entries)
        .def("at", &WeightTable::at, py::arg("k"))
        .def("total", &WeightTable::total);
    m.def("weight_table", &weight_table, py::arg("profile"), py::arg("d"));
    py::class_<SymReport>(m, "SymReport")
        .def_readwrite("pass_", &SymReport::pass)
        .def_readwrite("table", &SymReport::table)
        .def_readwrite("enumerated", &SymReport::enumerated);
    m.def("sym_check", &sym_check, py::arg("profile"), py::arg("d"));
    m.def("twistor_h0", &twistor_h0, py::arg("weights"));
    py::class_<ProductReport>(m, "ProductReport")
        .def_readwrite("pass_", &ProductReport::pass)
        .def_readwrite("pairs_checked", &ProductReport::pairs_checked);
    m.def("filtration_product_check", &filtration_product_check, py::arg("profile"),
          py::arg("n"));

    // ---- check suites -----------------------------------------------------

    py::class_<SuiteResult>(m, "SuiteResult")
        .def_readwrite("name", &SuiteResult::name)
        .def_readwrite("pass_", &SuiteResult::pass)
        .def_readwrite("checks", &SuiteResult::checks)
        .def_readwrite("failures", &SuiteResult::failures);
    m.def("suite_names", &suite_names);
    m.def("run_suite", &run_suite, py::arg("name"), py::arg("cfg") = Config{});
}
