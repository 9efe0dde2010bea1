#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cosparse/dataio.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"
#include "cosparse/metrics.hpp"
#include "cosparse/operators.hpp"
#include "cosparse/reconstruction.hpp"

namespace py = pybind11;
using namespace cosparse;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-D arrays become single columns.
DenseMatrix to_matrix(const Array& a) {
    if (a.ndim() == 1) {
        return DenseMatrix(static_cast<std::size_t>(a.shape(0)), 1,
                           std::vector<double>(a.data(), a.data() + a.size()));
    }
    if (a.ndim() != 2) throw ShapeError("expected a 1-D or 2-D array");
    return DenseMatrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                       std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const DenseMatrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

AnalysisOperator resolve_omega(const std::optional<Array>& omega, std::size_t n_signal) {
    if (!omega) return second_order_diff(n_signal);
    return {to_matrix(*omega), 0};
}

GapConfig gap_config(std::size_t t, double lambda, std::optional<std::size_t> k_max, bool keep_previous,
                     const std::string& ratio_test, const std::string& aggregation) {
    GapConfig cfg;
    cfg.t = t;
    cfg.lambda = lambda;
    cfg.k_max_override = k_max;
    cfg.keep_previous_on_stop = keep_previous;
    if (ratio_test == "magnitude") cfg.ratio_test = RatioTest::magnitude;
    else if (ratio_test == "signed") cfg.ratio_test = RatioTest::signed_increase;
    else throw ConfigError("ratio_test must be 'magnitude' or 'signed'");
    if (aggregation == "signed_sum") cfg.aggregation = RowAggregation::signed_sum;
    else if (aggregation == "abs_sum") cfg.aggregation = RowAggregation::abs_sum;
    else throw ConfigError("aggregation must be 'signed_sum' or 'abs_sum'");
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_cosparse, m) {
    m.doc() = "Greedy analysis pursuit (GAP/SGAP) and orthogonal multi-matching pursuit (OMMP/SOMMP)";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
    py::register_exception<MetricError>(m, "MetricError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<ReconstructionResult>(m, "ReconstructionResult")
        .def_property_readonly("estimate", [](const ReconstructionResult& r) { return to_array(r.estimate); })
        .def_property_readonly("coefficients",
                               [](const ReconstructionResult& r) -> py::object {
                                   if (r.coefficients.empty()) return py::none();
                                   return to_array(r.coefficients);
                               })
        .def_readonly("iterations", &ReconstructionResult::iterations)
        .def_readonly("index_set", &ReconstructionResult::index_set)
        .def_readonly("index_set_sizes", &ReconstructionResult::index_set_sizes)
        .def_readonly("residual_ratio_history", &ReconstructionResult::residual_ratio_history)
        .def_readonly("relative_residual_history", &ReconstructionResult::relative_residual_history)
        .def_readonly("solve_count", &ReconstructionResult::solve_count)
        .def_readonly("product_count", &ReconstructionResult::product_count)
        .def_readonly("wall_time", &ReconstructionResult::wall_time)
        .def_readonly("ridge_fallback", &ReconstructionResult::ridge_fallback)
        .def_property_readonly("stop_reason",
                               [](const ReconstructionResult& r) { return std::string(to_string(r.stop_reason)); });

    py::class_<BoxplotSummary>(m, "BoxplotSummary")
        .def_readonly("low", &BoxplotSummary::low)
        .def_readonly("p25", &BoxplotSummary::p25)
        .def_readonly("median", &BoxplotSummary::median)
        .def_readonly("p75", &BoxplotSummary::p75)
        .def_readonly("high", &BoxplotSummary::high)
        .def_readonly("outliers", &BoxplotSummary::outliers)
        .def_readonly("w", &BoxplotSummary::w);

    m.def("first_order_diff", [](std::size_t n) { return to_array(first_order_diff(n).matrix); }, py::arg("n_signal"));
    m.def("second_order_diff", [](std::size_t n) { return to_array(second_order_diff(n).matrix); },
          py::arg("n_signal"));
    m.def(
        "gaussian_measurement",
        [](std::size_t n, std::size_t n_signal, std::uint64_t seed) {
            return to_array(gaussian_measurement(n, n_signal, seed).matrix);
        },
        py::arg("n"), py::arg("n_signal"), py::arg("seed"));
    m.def(
        "daubechies_dictionary",
        [](std::size_t n_signal, int order, std::optional<int> levels) {
            return to_array(daubechies_dictionary(n_signal, order, levels.value_or(default_wavelet_levels(n_signal)))
                                .matrix);
        },
        py::arg("n_signal"), py::arg("wavelet_order") = 4, py::arg("levels") = py::none());

    m.def(
        "solve_spd", [](const Array& a, const Array& b) { return to_array(linalg::solve_spd(to_matrix(a), to_matrix(b))); },
        py::arg("a"), py::arg("b"));

    auto def_gap = [&](const char* name, auto fn, const char* doc) {
        m.def(
            name,
            [fn](const Array& y, const Array& phi, const std::optional<Array>& omega, std::size_t t, double lambda,
                 std::optional<std::size_t> k_max, bool keep_previous, const std::string& ratio_test,
                 const std::string& aggregation) {
                const MeasurementMatrix mm{to_matrix(phi), 0, Ensemble::gaussian};
                const auto op = resolve_omega(omega, mm.n_signal());
                const auto cfg = gap_config(t, lambda, k_max, keep_previous, ratio_test, aggregation);
                py::gil_scoped_release release;
                return fn(to_matrix(y), mm, op, cfg);
            },
            doc, py::arg("y"), py::arg("phi"), py::arg("omega") = py::none(), py::arg("t") = 10,
            py::arg("lam") = 0.05, py::arg("k_max") = py::none(), py::arg("keep_previous") = false,
            py::arg("ratio_test") = "magnitude", py::arg("aggregation") = "signed_sum");
    };
    def_gap("gap", [](const DenseMatrix& y, const MeasurementMatrix& p, const AnalysisOperator& o,
                      const GapConfig& c) { return gap(y, p, o, c); },
            "Single-channel GAP. omega defaults to the second-order difference operator.");
    def_gap("sgap", [](const DenseMatrix& y, const MeasurementMatrix& p, const AnalysisOperator& o,
                       const GapConfig& c) { return sgap(y, p, o, c); },
            "Multi-channel SGAP over the columns of y.");

    auto def_pursuit = [&](const char* name, bool joint) {
        m.def(
            name,
            [joint](const Array& y, const Array& phi, std::optional<Array> psi, std::size_t atoms_per_iter,
                    double residual_tol, std::optional<std::size_t> max_iter) {
                PursuitConfig cfg;
                cfg.atoms_per_iter = atoms_per_iter;
                cfg.residual_tol = residual_tol;
                cfg.max_iter = max_iter;
                const DenseMatrix phi_m = to_matrix(phi);
                SynthesisDictionary dict;
                dict.matrix = psi ? to_matrix(*psi)
                                  : daubechies_dictionary(phi_m.cols(), 4, default_wavelet_levels(phi_m.cols())).matrix;
                const DenseMatrix ym = to_matrix(y);
                py::gil_scoped_release release;
                const auto a = linalg::matmul(phi_m, dict.matrix);
                return joint ? sommp(ym, a, dict, cfg) : ommp(ym, a, dict, cfg);
            },
            py::arg("y"), py::arg("phi"), py::arg("psi") = py::none(), py::arg("atoms_per_iter") = 4,
            py::arg("residual_tol") = 1e-4, py::arg("max_iter") = py::none());
    };
    def_pursuit("ommp", false);
    def_pursuit("sommp", true);

    m.def("prd", [](const Array& x, const Array& x_hat) { return prd(to_matrix(x), to_matrix(x_hat)); },
          py::arg("x"), py::arg("x_hat"));
    m.def("compression_ratio", &compression_ratio, py::arg("n"), py::arg("n_signal"));
    m.def(
        "boxplot_stats", [](const std::vector<double>& v, double w) { return boxplot_stats(v, w); },
        py::arg("values"), py::arg("w") = kDefaultWhisker);
    m.def(
        "synth_cosparse",
        [](std::size_t n_signal, std::size_t cosupport, std::size_t channels, bool shared, std::uint64_t seed) {
            auto s = synth_cosparse(n_signal, cosupport, channels, shared, seed);
            return py::make_tuple(to_array(s.segment.data), s.cosupports);
        },
        py::arg("n_signal"), py::arg("cosupport_size"), py::arg("channels") = 1, py::arg("shared") = true,
        py::arg("seed") = 0);
}
