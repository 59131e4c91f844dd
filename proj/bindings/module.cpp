#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "henlab/io.hpp"
#include "henlab/measure.hpp"
#include "henlab/render.hpp"

namespace py = pybind11;
using namespace henlab;

namespace {

// Opaque holder so start samplers can be built in C++ and handed back to
// mass_escape without exposing the SplitMix64& callback signature.
struct SamplerHandle {
  StartSampler fn;
};

std::string point_repr(const Point2& z) {
  return "Point2(x=(" + format_double(z.x.real()) + (z.x.imag() < 0 ? "" : "+") +
         format_double(z.x.imag()) + "j), y=(" + format_double(z.y.real()) +
         (z.y.imag() < 0 ? "" : "+") + format_double(z.y.imag()) + "j))";
}

}  // namespace

PYBIND11_MODULE(_henlab, mod) {
  mod.doc() = "group dynamics of generalized Henon maps of C^2";

  py::register_exception<EscapeOverflow>(mod, "EscapeOverflow", PyExc_OverflowError);

  py::class_<SplitMix64>(mod, "SplitMix64")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &SplitMix64::next)
      .def("next_double", &SplitMix64::next_double)
      .def("next_below", &SplitMix64::next_below, py::arg("n"));
  mod.def("substream", &substream, py::arg("seed"), py::arg("index"),
          "independent child stream of a master seed");

  py::class_<Point2>(mod, "Point2")
      .def(py::init<Complex, Complex>(), py::arg("x") = Complex(0.0),
           py::arg("y") = Complex(0.0))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def("__repr__", &point_repr);
  mod.def("norm", py::overload_cast<const Point2&>(&norm), py::arg("z"));
  mod.def("max_norm", &max_norm, py::arg("z"));

  py::enum_<Generator>(mod, "Generator")
      .value("H1", Generator::H1)
      .value("H2", Generator::H2)
      .value("H1Inv", Generator::H1Inv)
      .value("H2Inv", Generator::H2Inv);
  mod.def("token", &token, py::arg("g"));
  mod.def("inverse_letter", py::overload_cast<Generator>(&inverse), py::arg("g"));

  py::class_<Word>(mod, "Word")
      .def(py::init([](const std::string& s) { return word_from_string(s); }),
           py::arg("tokens") = "e")
      .def_readonly("letters", &Word::letters)
      .def("__len__", [](const Word& w) { return w.letters.size(); })
      .def("__eq__", [](const Word& a, const Word& b) { return a == b; })
      .def("__repr__", [](const Word& w) { return "Word('" + to_string(w) + "')"; })
      .def("__str__", [](const Word& w) { return to_string(w); });
  mod.def("reduce", [](const std::vector<Generator>& ls) { return reduce(ls); },
          py::arg("letters"));
  mod.def("concat", &concat, py::arg("u"), py::arg("v"));
  mod.def("inverse_word", py::overload_cast<const Word&>(&inverse), py::arg("w"));
  mod.def("reduced_count", &reduced_count, py::arg("n"));
  mod.def("enumerate_reduced", &enumerate_reduced, py::arg("n"));

  py::class_<WalkMeasure>(mod, "WalkMeasure")
      .def(py::init<std::array<double, 4>>(), py::arg("weights"))
      .def_static("uniform", &WalkMeasure::uniform)
      .def_property_readonly("weights", &WalkMeasure::weights)
      .def("is_symmetric", &WalkMeasure::is_symmetric, py::arg("tol") = 1e-12);
  mod.def("sample_walk", &sample_walk, py::arg("nu"), py::arg("n"), py::arg("rng"));

  py::class_<DriftEstimate>(mod, "DriftEstimate")
      .def_readonly("mean", &DriftEstimate::mean)
      .def_readonly("std_error", &DriftEstimate::std_error)
      .def_readonly("n", &DriftEstimate::n)
      .def_readonly("trials", &DriftEstimate::trials);
  mod.def("drift_estimate", &drift_estimate, py::arg("nu"), py::arg("n"), py::arg("trials"),
          py::arg("seed"));

  py::class_<HenonMap>(mod, "HenonMap")
      .def(py::init<std::vector<Complex>, Complex>(), py::arg("coefficients"),
           py::arg("delta"))
      .def_property_readonly("degree", &HenonMap::degree)
      .def_property_readonly("coefficients", &HenonMap::coefficients)
      .def_property_readonly("delta", &HenonMap::delta)
      .def("eval_poly", &HenonMap::eval_poly, py::arg("t"))
      .def("apply", [](const HenonMap& m, const Point2& z) { return apply(m, z); },
           py::arg("z"))
      .def("apply_inverse",
           [](const HenonMap& m, const Point2& z) { return apply_inverse(m, z); },
           py::arg("z"));
  mod.def("translate_diagonal", &translate_diagonal, py::arg("m"), py::arg("a"));

  mod.def("apply_projective",
          [](const HenonMap& m, Complex c0, Complex c1,
             Complex c2) -> std::optional<std::array<Complex, 3>> {
            const auto img = apply_projective(m, make_proj(c0, c1, c2));
            if (!img) return std::nullopt;
            return img->c;
          },
          py::arg("m"), py::arg("c0"), py::arg("c1"), py::arg("c2"),
          "canonical image in CP^2, or None at the indeterminacy point");

  py::enum_<Region>(mod, "Region")
      .value("V", Region::V)
      .value("VPlus", Region::VPlus)
      .value("VMinus", Region::VMinus);
  py::class_<Filtration>(mod, "Filtration")
      .def_readonly("radius", &Filtration::radius)
      .def_readonly("lambda_", &Filtration::lambda);
  mod.def("filtration_radius", &filtration_radius, py::arg("m"), py::arg("lambda_") = 2.0);
  mod.def("certified_filtration", &certified_filtration, py::arg("m"),
          py::arg("lambda_") = 2.0);
  mod.def("classify_region", &classify_region, py::arg("f"), py::arg("z"));

  py::class_<GroupPreset>(mod, "GroupPreset")
      .def(py::init<HenonMap, double>(), py::arg("map"), py::arg("theta"))
      .def_readonly("map", &GroupPreset::map)
      .def_readonly("theta", &GroupPreset::theta);

  py::class_<GeneratorSystem>(mod, "GeneratorSystem")
      .def_static("rotation", &GeneratorSystem::rotation, py::arg("preset"),
                  py::arg("lambda_") = 2.0)
      .def_static("pair", &GeneratorSystem::pair, py::arg("m1"), py::arg("m2"),
                  py::arg("lambda_") = 2.0)
      .def("apply", &GeneratorSystem::apply, py::arg("g"), py::arg("z"))
      .def("apply_word", &GeneratorSystem::apply_word, py::arg("w"), py::arg("z"))
      .def("certifies", &GeneratorSystem::certifies, py::arg("g"), py::arg("z"))
      .def_property_readonly("is_rotation", &GeneratorSystem::is_rotation)
      .def_property_readonly("theta", &GeneratorSystem::theta)
      .def_property_readonly("filtration1", &GeneratorSystem::filtration1);

  py::class_<Trajectory>(mod, "Trajectory")
      .def_readonly("points", &Trajectory::points)
      .def_readonly("letters", &Trajectory::letters)
      .def_readonly("escaped_at", &Trajectory::escaped_at)
      .def_readonly("escape_certified", &Trajectory::escape_certified)
      .def_readonly("overflowed", &Trajectory::overflowed);
  mod.def("orbit",
          [](const GeneratorSystem& sys, const std::vector<Generator>& letters,
             const Point2& start, double max_norm) {
            return orbit(sys, letters, start, max_norm);
          },
          py::arg("sys"), py::arg("letters"), py::arg("start"), py::arg("max_norm"));

  py::class_<IndeterminacySet>(mod, "IndeterminacySet")
      .def_readonly("min_pairwise", &IndeterminacySet::min_pairwise);
  mod.def("indeterminacy_set", &indeterminacy_set, py::arg("theta"));

  py::class_<CollarParams>(mod, "CollarParams")
      .def(py::init<double, double>(), py::arg("r_u"), py::arg("beta"))
      .def_readwrite("r_u", &CollarParams::r_u)
      .def_readwrite("beta", &CollarParams::beta);
  mod.def("in_collar", &in_collar, py::arg("dirs"), py::arg("cp"), py::arg("z"));
  mod.def("sample_in_collar", &sample_in_collar, py::arg("dirs"), py::arg("cp"),
          py::arg("rng"));

  py::class_<CollarCheck>(mod, "CollarCheck")
      .def_readonly("passed", &CollarCheck::pass)
      .def_readonly("samples", &CollarCheck::samples)
      .def_readonly("word_length", &CollarCheck::word_length)
      .def_readonly("required_ratio", &CollarCheck::required_ratio)
      .def_readonly("min_ratio", &CollarCheck::min_ratio)
      .def_readonly("witness_word", &CollarCheck::witness_word);
  mod.def("verify_collar_escape", &verify_collar_escape, py::arg("sys"), py::arg("dirs"),
          py::arg("cp"), py::arg("k"), py::arg("samples"), py::arg("seed"));

  py::class_<ConeSystem>(mod, "ConeSystem");
  py::class_<ConeCheck>(mod, "ConeCheck")
      .def_readonly("passed", &ConeCheck::pass)
      .def_readonly("no_evidence", &ConeCheck::no_evidence)
      .def_readonly("min_ratio", &ConeCheck::min_ratio);
  py::class_<ConeSearch>(mod, "ConeSearch")
      .def(py::init<>())
      .def_readwrite("aperture_start", &ConeSearch::aperture_start)
      .def_readwrite("aperture_factor", &ConeSearch::aperture_factor)
      .def_readwrite("aperture_steps", &ConeSearch::aperture_steps)
      .def_readwrite("radius_cap", &ConeSearch::radius_cap)
      .def_readwrite("samples", &ConeSearch::samples)
      .def_readwrite("seed", &ConeSearch::seed);
  py::class_<ConeSearchResult>(mod, "ConeSearchResult")
      .def_readonly("system", &ConeSearchResult::system)
      .def_readonly("log", &ConeSearchResult::log);
  mod.def("build_cone_system", &build_cone_system, py::arg("preset"), py::arg("f"),
          py::arg("search") = ConeSearch{});
  mod.def("verify_cone_doubling", &verify_cone_doubling, py::arg("sys"), py::arg("cones"),
          py::arg("samples_per_pair"), py::arg("seed"));
  mod.def("verify_cone_transitions", &verify_cone_transitions, py::arg("sys"),
          py::arg("cones"), py::arg("samples_per_pair"), py::arg("seed"));

  mod.def("simulate_chain", &simulate_chain, py::arg("sys"), py::arg("nu"), py::arg("start"),
          py::arg("steps"), py::arg("seed"), py::arg("guard") = 1e12);

  py::class_<HistogramBox>(mod, "HistogramBox")
      .def(py::init<Point2, double>(), py::arg("center"), py::arg("half_width"))
      .def_readwrite("center", &HistogramBox::center)
      .def_readwrite("half_width", &HistogramBox::half_width);

  py::class_<GridHistogram>(mod, "GridHistogram")
      .def(py::init<HistogramBox, int>(), py::arg("box"), py::arg("bins"))
      .def("add", &GridHistogram::add, py::arg("z"))
      .def("add_escaped", &GridHistogram::add_escaped, py::arg("n") = 1)
      .def("cell_index", &GridHistogram::cell_index, py::arg("z"))
      .def("cell_center", &GridHistogram::cell_center, py::arg("index"))
      .def_property_readonly("bins", &GridHistogram::bins)
      .def_property_readonly("counts", &GridHistogram::counts)
      .def_property_readonly("escaped", &GridHistogram::escaped)
      .def_property_readonly("total", &GridHistogram::total);
  mod.def("empirical_measure",
          [](const std::vector<Trajectory>& ts, const HistogramBox& box, int bins) {
            return empirical_measure(std::span<const Trajectory>(ts), box, bins);
          },
          py::arg("trajectories"), py::arg("box"), py::arg("bins"));
  mod.def("stationarity_defect", &stationarity_defect, py::arg("sys"), py::arg("nu"),
          py::arg("histogram"), py::arg("pushforward_samples"), py::arg("seed"));

  py::class_<SamplerHandle>(mod, "StartSampler");
  mod.def("fixed_starts",
          [](std::vector<Point2> pts) { return SamplerHandle{fixed_starts(std::move(pts))}; },
          py::arg("points"));
  mod.def("collar_starts",
          [](const IndeterminacySet& dirs, const CollarParams& cp) {
            return SamplerHandle{collar_starts(dirs, cp)};
          },
          py::arg("dirs"), py::arg("cp"));
  mod.def("box_starts",
          [](const HistogramBox& box) { return SamplerHandle{box_starts(box)}; },
          py::arg("box"));
  mod.def("mass_escape",
          [](const GeneratorSystem& sys, const WalkMeasure& nu, const SamplerHandle& starts,
             int steps, double ball_radius, int trials, std::uint64_t seed, double guard) {
            return mass_escape(sys, nu, starts.fn, steps, ball_radius, trials, seed, guard);
          },
          py::arg("sys"), py::arg("nu"), py::arg("starts"), py::arg("steps"),
          py::arg("ball_radius"), py::arg("trials"), py::arg("seed"),
          py::arg("guard") = 1e12);

  py::class_<WeightedPoint>(mod, "WeightedPoint")
      .def(py::init<Point2, double>(), py::arg("z"), py::arg("w"))
      .def_readwrite("z", &WeightedPoint::z)
      .def_readwrite("w", &WeightedPoint::w);
  py::class_<MassIdentity>(mod, "MassIdentity")
      .def_readonly("lhs", &MassIdentity::lhs)
      .def_readonly("rhs", &MassIdentity::rhs)
      .def_readonly("gap", &MassIdentity::gap)
      .def_readonly("omega_count", &MassIdentity::omega_count);
  mod.def("word_average_mass",
          [](const GeneratorSystem& sys, const WalkMeasure& nu,
             const std::vector<WeightedPoint>& sample, const CollarParams& cp, int n) {
            return word_average_mass(sys, nu, std::span<const WeightedPoint>(sample), cp, n);
          },
          py::arg("sys"), py::arg("nu"), py::arg("sample"), py::arg("cp"), py::arg("n"));

  mod.def("ergodic_average", &ergodic_average, py::arg("sys"), py::arg("nu"),
          py::arg("f_name"), py::arg("f_param"), py::arg("start"), py::arg("n"),
          py::arg("seed"));

  py::enum_<JuliaVerdict::Kind>(mod, "JuliaKind")
      .value("InK", JuliaVerdict::Kind::InK)
      .value("EscapesForward", JuliaVerdict::Kind::EscapesForward)
      .value("EscapesBackward", JuliaVerdict::Kind::EscapesBackward)
      .value("Undecided", JuliaVerdict::Kind::Undecided);
  py::class_<JuliaVerdict>(mod, "JuliaVerdict")
      .def_readonly("kind", &JuliaVerdict::kind)
      .def_readonly("step", &JuliaVerdict::step)
      .def("bounded_like", &JuliaVerdict::bounded_like)
      .def("__repr__", [](const JuliaVerdict& v) {
        return std::string("JuliaVerdict(") + to_string(v.kind) + ", step=" +
               std::to_string(v.step) + ")";
      });
  mod.def("classify_filled_julia",
          [](const HenonMap& m, const Point2& z, int budget,
             std::optional<Filtration> f) {
            return classify_filled_julia(m, z, budget,
                                         f ? *f : certified_filtration(m, 2.0));
          },
          py::arg("m"), py::arg("z"), py::arg("budget"), py::arg("f") = std::nullopt);

  py::class_<DisjointnessReport::Row>(mod, "DisjointnessRow")
      .def_readonly("z", &DisjointnessReport::Row::z)
      .def_readonly("first", &DisjointnessReport::Row::first)
      .def_readonly("second", &DisjointnessReport::Row::second);
  py::class_<DisjointnessReport>(mod, "DisjointnessReport")
      .def_readonly("rows", &DisjointnessReport::rows)
      .def_readonly("overlap_count", &DisjointnessReport::overlap_count)
      .def_readonly("total", &DisjointnessReport::total)
      .def_readonly("disjoint_heuristic", &DisjointnessReport::disjoint_heuristic)
      .def_readonly("sampling_only", &DisjointnessReport::sampling_only);
  mod.def("disjointness_report", &disjointness_report, py::arg("m1"), py::arg("m2"),
          py::arg("box"), py::arg("samples"), py::arg("budget"), py::arg("seed"));

  py::class_<SliceSpec>(mod, "SliceSpec")
      .def(py::init<Point2, Point2, Point2>(), py::arg("anchor"), py::arg("u"), py::arg("v"))
      .def_readwrite("anchor", &SliceSpec::anchor)
      .def_readwrite("u", &SliceSpec::u)
      .def_readwrite("v", &SliceSpec::v);
  mod.def("real_plane_slice", &real_plane_slice, py::arg("extent"));
  mod.def("y_plane_slice", &y_plane_slice, py::arg("x0"), py::arg("extent"));
  mod.def("slice_point", &slice_point, py::arg("slice"), py::arg("width"), py::arg("height"),
          py::arg("ix"), py::arg("iy"));

  py::enum_<RenderMode>(mod, "RenderMode")
      .value("Forward", RenderMode::Forward)
      .value("Biorbit", RenderMode::Biorbit)
      .value("Group", RenderMode::Group);
  py::class_<RenderSpec>(mod, "RenderSpec")
      .def(py::init<>())
      .def_readwrite("slice", &RenderSpec::slice)
      .def_readwrite("width", &RenderSpec::width)
      .def_readwrite("height", &RenderSpec::height)
      .def_readwrite("mode", &RenderSpec::mode)
      .def_readwrite("budget", &RenderSpec::budget)
      .def_readwrite("word_length", &RenderSpec::word_length)
      .def_readwrite("words", &RenderSpec::words)
      .def_readwrite("escape_radius", &RenderSpec::escape_radius)
      .def_readwrite("seed", &RenderSpec::seed);
  py::class_<Raster>(mod, "Raster")
      .def_readonly("width", &Raster::width)
      .def_readonly("height", &Raster::height)
      .def_readonly("cap", &Raster::cap)
      .def_readonly("values", &Raster::values)
      .def("pgm_bytes",
           [](const Raster& r, const std::string& comment) {
             return py::bytes(to_pgm(r.to_pgm(), comment));
           },
           py::arg("comment") = "raster");
  mod.def("render_escape_slice", &render_escape_slice, py::arg("sys"), py::arg("spec"));

  mod.def("fnv1a64", [](const py::bytes& b) { return fnv1a64(std::string(b)); },
          py::arg("data"));
  mod.def("format_double", &format_double, py::arg("value"));
}
