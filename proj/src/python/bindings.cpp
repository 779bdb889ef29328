#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tsdistill/annotation.hpp"
#include "tsdistill/annotation_client.hpp"
#include "tsdistill/config.hpp"
#include "tsdistill/dataset.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/eval_harness.hpp"
#include "tsdistill/fact_check.hpp"
#include "tsdistill/feature_oracle.hpp"
#include "tsdistill/ou_generator.hpp"
#include "tsdistill/plot_render.hpp"
#include "tsdistill/scoring.hpp"
#include "tsdistill/tokenizer_prep.hpp"

namespace py = pybind11;
using namespace tsdistill;

namespace {

template <class E>
void enum_values(py::enum_<E>& e, std::initializer_list<E> values) {
  for (E v : values) e.value(std::string(to_string(v)).c_str(), v);
}

PipelineConfig config_from_dict(const py::dict& d) {
  auto json_mod = py::module_::import("json");
  const auto text = json_mod.attr("dumps")(d).cast<std::string>();
  return config_from_json(nlohmann::json::parse(text));
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-reverting series generation, feature oracle and annotation scoring";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<TransportError>(m, "TransportError", error.ptr());
  auto data_error = py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", data_error.ptr());

  // ---- generation
  py::class_<OuParams>(m, "OuParams")
      .def(py::init([](double kappa, double r_bar, double sigma, int n_steps, std::uint64_t seed) {
             return OuParams{kappa, r_bar, sigma, n_steps, seed};
           }),
           py::arg("kappa") = 0.1, py::arg("r_bar") = 0.0, py::arg("sigma") = 1.0,
           py::arg("n_steps") = 100, py::arg("seed") = 0)
      .def_readwrite("kappa", &OuParams::kappa)
      .def_readwrite("r_bar", &OuParams::r_bar)
      .def_readwrite("sigma", &OuParams::sigma)
      .def_readwrite("n_steps", &OuParams::n_steps)
      .def_readwrite("seed", &OuParams::seed)
      .def("validate", &OuParams::validate)
      .def("__eq__", [](const OuParams& a, const OuParams& b) { return a == b; })
      .def("__repr__", [](const OuParams& p) {
        return "OuParams(kappa=" + std::to_string(p.kappa) + ", r_bar=" + std::to_string(p.r_bar) +
               ", sigma=" + std::to_string(p.sigma) + ", n_steps=" + std::to_string(p.n_steps) +
               ", seed=" + std::to_string(p.seed) + ")";
      });

  py::class_<ParamRanges>(m, "ParamRanges")
      .def(py::init([](std::pair<double, double> kappa, std::pair<double, double> r_bar,
                       std::pair<double, double> sigma, int n_steps) {
             ParamRanges r;
             r.kappa = {kappa.first, kappa.second};
             r.r_bar = {r_bar.first, r_bar.second};
             r.sigma = {sigma.first, sigma.second};
             r.n_steps = n_steps;
             return r;
           }),
           py::arg("kappa") = std::pair{0.01, 0.5}, py::arg("r_bar") = std::pair{-50.0, 50.0},
           py::arg("sigma") = std::pair{0.5, 10.0}, py::arg("n_steps") = 100)
      .def_property_readonly("kappa", [](const ParamRanges& r) { return std::pair{r.kappa.lo, r.kappa.hi}; })
      .def_property_readonly("r_bar", [](const ParamRanges& r) { return std::pair{r.r_bar.lo, r.r_bar.hi}; })
      .def_property_readonly("sigma", [](const ParamRanges& r) { return std::pair{r.sigma.lo, r.sigma.hi}; })
      .def_readwrite("n_steps", &ParamRanges::n_steps);

  m.def("generate_series", [](const OuParams& p) { return generate_series(p).values; }, py::arg("params"),
        "Simulate the mean-reverting recursion; returns n_steps + 1 values starting at 0.");
  m.def("sample_params", &sample_params, py::arg("ranges"), py::arg("seed"));
  m.def("theoretical_moments",
        [](const OuParams& p, int t) {
          const auto mo = theoretical_moments(p, t);
          return std::pair{mo.mean, mo.variance};
        },
        py::arg("params"), py::arg("t"), "Exact (mean, variance) of r_t.");

  // ---- feature oracle
  py::enum_<Trend> trend(m, "Trend");
  enum_values(trend, {Trend::increasing, Trend::flat, Trend::decreasing});
  py::enum_<NoiseLevel> noise(m, "NoiseLevel");
  enum_values(noise, {NoiseLevel::low, NoiseLevel::medium, NoiseLevel::high});
  py::enum_<Location> loc(m, "Location");
  enum_values(loc, {Location::beginning, Location::middle, Location::end});
  py::enum_<Field> field(m, "Field");
  enum_values(field, {Field::trend, Field::noise, Field::extrema});
  py::enum_<AnnotationSource> source(m, "AnnotationSource");
  enum_values(source, {AnnotationSource::llm, AnnotationSource::oracle, AnnotationSource::replaced});
  py::enum_<NliLabel> nli(m, "NliLabel");
  enum_values(nli, {NliLabel::entailment, NliLabel::neutral, NliLabel::contradiction});

  py::class_<FeatureLabels>(m, "FeatureLabels")
      .def(py::init<>())
      .def_readwrite("trend", &FeatureLabels::trend)
      .def_readwrite("noise", &FeatureLabels::noise)
      .def_readwrite("max_loc", &FeatureLabels::max_loc)
      .def_readwrite("min_loc", &FeatureLabels::min_loc)
      .def_readwrite("max_index", &FeatureLabels::max_index)
      .def_readwrite("min_index", &FeatureLabels::min_index)
      .def("__eq__", [](const FeatureLabels& a, const FeatureLabels& b) { return a == b; });

  m.def("smooth", [](const std::vector<double>& s, int w) { return smooth(s, w); }, py::arg("series"),
        py::arg("window"));
  m.def("classify_trend", [](const std::vector<double>& s) { return classify_trend(s); }, py::arg("series"));
  m.def("classify_noise", [](const std::vector<double>& s) { return classify_noise(s); }, py::arg("series"));
  m.def("noise_ratio", [](const std::vector<double>& s) { return noise_ratio(s); }, py::arg("series"));
  m.def("locate_extrema",
        [](const std::vector<double>& s) {
          const auto e = locate_extrema(s);
          return py::make_tuple(e.max_loc, e.min_loc, e.max_index, e.min_index);
        },
        py::arg("series"), "Returns (max_loc, min_loc, max_index, min_index).");
  m.def("compute_labels", [](const std::vector<double>& s) { return compute_labels(s); }, py::arg("series"));

  py::class_<Annotation>(m, "Annotation")
      .def(py::init([](std::string t, std::string n, std::string e, AnnotationSource src) {
             return Annotation{std::move(t), std::move(n), std::move(e), src};
           }),
           py::arg("trend"), py::arg("noise"), py::arg("extrema"),
           py::arg("source") = AnnotationSource::llm)
      .def_readwrite("trend", &Annotation::trend)
      .def_readwrite("noise", &Annotation::noise)
      .def_readwrite("extrema", &Annotation::extrema)
      .def_readwrite("source", &Annotation::source)
      .def("paragraph", &Annotation::paragraph)
      .def("to_json_pattern", &Annotation::to_json_pattern)
      .def("__eq__", [](const Annotation& a, const Annotation& b) { return a == b; });

  m.def("render_fact_sentences", &render_fact_sentences, py::arg("labels"));

  // ---- numeric serialization
  m.def("rescale_to_integers", [](const std::vector<double>& s) { return rescale_to_integers(s).ints; },
        py::arg("series"));
  m.def("serialize_digits", [](const std::vector<int>& v) { return serialize_digits(v); }, py::arg("values"));
  m.def("parse_digits", &parse_digits, py::arg("text"));

  // ---- plotting
  m.def("render_plot",
        [](const std::vector<double>& s, const std::filesystem::path& path, int width, int height) {
          PlotConfig cfg;
          cfg.width = width;
          cfg.height = height;
          render_plot(s, path, cfg);
        },
        py::arg("series"), py::arg("path"), py::arg("width") = 800, py::arg("height") = 600);
  m.def("render_plot_png",
        [](const std::vector<double>& s) {
          const auto png = render_plot_png(s);
          return py::bytes(reinterpret_cast<const char*>(png.data()), png.size());
        },
        py::arg("series"));

  // ---- annotation
  m.def("build_prompt", &build_prompt);
  m.def("parse_annotation_json", &parse_annotation_json, py::arg("text"));
  m.def("mock_annotate", [](const std::vector<double>& s) { return mock_annotate(s); }, py::arg("series"));

  // ---- scoring
  m.def("extract_category",
        [](const std::string& sentence, Field f) -> py::object {
          const auto cat = extract_category(sentence, f);
          if (!cat) return py::none();
          if (auto* t = std::get_if<Trend>(&*cat)) return py::cast(*t);
          if (auto* n = std::get_if<NoiseLevel>(&*cat)) return py::cast(*n);
          const auto& e = std::get<ExtremaMention>(*cat);
          return py::make_tuple(e.max_loc, e.min_loc);
        },
        py::arg("sentence"), py::arg("field"),
        "Trend, NoiseLevel, (max_loc, min_loc) for extrema, or None.");
  m.def("rule_nli",
        [](const std::string& premise, const std::string& hypothesis, Field f) {
          RuleScorer scorer;
          const auto v = nli_compare(premise, hypothesis, scorer, f);
          return py::make_tuple(v.label, v.score);
        },
        py::arg("premise"), py::arg("hypothesis"), py::arg("field"),
        "Rule-based verdict; returns (label, score).");
  m.def("fact_check_sample",
        [](const Annotation& a, const FeatureLabels& labels) {
          RuleScorer scorer;
          const auto c = fact_check_sample(a, labels, scorer);
          return py::make_tuple(c.annotation, c.verdicts.trend.label, c.verdicts.noise.label,
                                c.verdicts.extrema.label);
        },
        py::arg("annotation"), py::arg("labels"));

  m.def("evaluate",
        [](const std::vector<std::tuple<std::string, Annotation, FeatureLabels>>& test_set,
           const std::vector<std::pair<std::string, std::string>>& candidates) {
          std::vector<EvalSample> ts;
          for (const auto& [id, ref, labels] : test_set) ts.push_back({id, ref, labels});
          std::vector<CandidateOutput> cs;
          for (const auto& [id, text] : candidates) cs.push_back({id, text, {}});
          RuleScorer scorer;
          return json_to_py(to_json(evaluate(ts, cs, scorer, nullptr)));
        },
        py::arg("test_set"), py::arg("candidates"),
        "Strict-mode evaluation with the rule scorer; returns the report as a dict.");

  // ---- dataset
  m.def("build_dataset",
        [](const py::dict& config, bool force) {
          const auto cfg = config_from_dict(config);
          auto annotator = make_annotator(cfg);
          auto scorer = make_scorer(cfg.scorer);
          py::gil_scoped_release release;
          const auto manifest = build_dataset(cfg, *annotator, *scorer, force);
          py::gil_scoped_acquire acquire;
          return json_to_py(manifest.to_json());
        },
        py::arg("config"), py::arg("force") = false,
        "Run the full pipeline for a config dict; returns the manifest as a dict.");

  m.attr("__version__") = kToolVersion;
}
