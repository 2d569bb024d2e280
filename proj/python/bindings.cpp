#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spfts/diagnostics.hpp"
#include "spfts/dgp.hpp"
#include "spfts/errors.hpp"
#include "spfts/rank.hpp"
#include "spfts/serialize.hpp"
#include "spfts/spectral.hpp"

namespace py = pybind11;
using namespace spfts;

namespace {

BasisContextPtr default_context(int q) {
  return build_fourier_basis(q, std::max(101, 4 * q + 1));
}

py::array_t<double> slices_to_array(const std::vector<Eigen::MatrixXd>& slices) {
  const auto q = static_cast<py::ssize_t>(slices.size());
  const py::ssize_t rows = slices.empty() ? 0 : slices.front().rows();
  const py::ssize_t cols = slices.empty() ? 0 : slices.front().cols();
  py::array_t<double> out({rows, cols, q});
  auto view = out.mutable_unchecked<3>();
  for (py::ssize_t n = 0; n < q; ++n) {
    const auto& slice = slices[static_cast<std::size_t>(n)];
    for (py::ssize_t i = 0; i < rows; ++i) {
      for (py::ssize_t t = 0; t < cols; ++t) view(i, t, n) = slice(i, t);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> array_to_slices(const py::array_t<double>& arr) {
  if (arr.ndim() != 3) throw ConfigError("expected a (p, T, q) array");
  const auto view = arr.unchecked<3>();
  std::vector<Eigen::MatrixXd> slices(static_cast<std::size_t>(view.shape(2)),
                                      Eigen::MatrixXd(view.shape(0), view.shape(1)));
  for (py::ssize_t n = 0; n < view.shape(2); ++n) {
    auto& slice = slices[static_cast<std::size_t>(n)];
    for (py::ssize_t i = 0; i < view.shape(0); ++i) {
      for (py::ssize_t t = 0; t < view.shape(1); ++t) slice(i, t) = view(i, t, n);
    }
  }
  return slices;
}

ModelConfig parse_model(const std::string& model_json) {
  return model_config_from_json(json::parse(model_json));
}

// pybind11 holders must be non-const; keep the immutable context behind a wrapper.
struct PyBasis {
  BasisContextPtr ctx;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonstationary functional panel simulation and spectral diagnostics";

  py::register_exception<ConfigError>(m, "SpftsConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "SpftsDataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "SpftsNumericError", PyExc_ArithmeticError);

  py::class_<PyBasis>(m, "FourierBasis")
      .def(py::init([](int q, int m_pts) { return PyBasis{build_fourier_basis(q, m_pts)}; }),
           py::arg("q"), py::arg("m") = 101)
      .def_property_readonly("q", [](const PyBasis& b) { return b.ctx->q; })
      .def_property_readonly("grid", [](const PyBasis& b) { return b.ctx->grid; })
      .def_property_readonly("eval", [](const PyBasis& b) { return b.ctx->eval; })
      .def_property_readonly("quad_weights", [](const PyBasis& b) { return b.ctx->quad_weights; })
      .def("orthonormality_defect",
           [](const PyBasis& b) { return b.ctx->orthonormality_defect(); })
      .def("project",
           [](const PyBasis& b, const Eigen::VectorXd& samples) {
             return project_curve(samples, b.ctx).coeffs;
           })
      .def("reconstruct", [](const PyBasis& b, const Eigen::VectorXd& coeffs) {
        return reconstruct(coeffs, *b.ctx);
      });

  m.def(
      "simulate",
      [](const std::string& model_json, py::object replicate) {
        const ModelConfig cfg = parse_model(model_json);
        const auto ctx = default_context(cfg.q);
        const SimulationDraw draw =
            replicate.is_none() ? simulate_panel(cfg, ctx)
                                : simulate_replicate(cfg, ctx, replicate.cast<std::uint64_t>());
        py::dict out;
        out["panel"] = slices_to_array(draw.panel.slices);
        out["factors"] = slices_to_array(draw.factors);
        out["innovations"] = slices_to_array(draw.innovations);
        py::list loadings;
        for (const auto& a : draw.loadings.A) loadings.append(py::cast(a));
        out["loadings"] = loadings;
        out["covariance"] = py::cast(draw.covariance.c);
        const OperatorMatrix om = build_omega(draw.loadings, ctx);
        out["trace_ce_omega"] = trace_ce_omega(draw.covariance, om);
        return out;
      },
      py::arg("model_json"), py::arg("replicate") = py::none());

  m.def("gram_matrix", [](const py::array_t<double>& panel) {
    FunctionalPanel fp;
    fp.slices = array_to_slices(panel);
    fp.context = default_context(static_cast<int>(fp.slices.size()));
    return gram_matrix(fp).S;
  });

  m.def(
      "eigendecompose",
      [](const Eigen::MatrixXd& s, int k_max) {
        const EigenDecomposition eig = eigendecompose(GramMatrix{s}, k_max);
        return py::make_tuple(eig.values, eig.vectors);
      },
      py::arg("gram"), py::arg("k_max") = 5);

  m.def("mtheta_svd", [](int T) {
    const MThetaSvd svd = mtheta_svd(T);
    return py::make_tuple(svd.sigma, svd.W, svd.V);
  });
  m.def("centering_matrix", &centering_matrix);
  m.def("cumulation_matrix", &cumulation_matrix);

  m.def("spurious_vector", &spurious_vector, py::arg("k"), py::arg("T"));
  m.def("alignment", &alignment, py::arg("u"), py::arg("k"));
  m.def("theory_eigenvalue", &theory_eigenvalue, py::arg("k"), py::arg("T"), py::arg("p"),
        py::arg("trace_ce_omega"));
  m.def("theory_share", &theory_share, py::arg("k"));
  m.def("eigenvector_acf", &eigenvector_acf, py::arg("u"), py::arg("max_lag") = 20);

  m.def("sample_haar_orthogonal",
        [](int n, std::uint64_t seed) { return sample_haar_orthogonal(n, seed); }, py::arg("n"),
        py::arg("seed"));

  m.def(
      "rank_report_json",
      [](const std::string& model_json, const std::vector<int>& k_grid) {
        const ModelConfig cfg = parse_model(model_json);
        const auto ctx = default_context(cfg.q);
        return to_json(build_rank_report(cfg, ctx, k_grid)).dump();
      },
      py::arg("model_json"), py::arg("k_grid") = std::vector<int>{5, 10, 20, 40});
}
