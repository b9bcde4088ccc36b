#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpp/oracle.hpp"
#include "dpp/samplers.hpp"

namespace py = pybind11;
using namespace dpp;

namespace {

kernels::KernelMatrix kernel_from_matrix(const Mat& m) {
  const auto v = numerics::validate_kernel(m);
  if (!v.ok) throw DomainError("invalid kernel: " + v.violation);
  kernels::KernelMatrix k;
  k.matrix = numerics::hermitize(m);
  k.provenance = "python matrix";
  return k;
}

IndexSet sample_with(const kernels::KernelMatrix& k, const std::string& algo,
                     uint64_t seed) {
  if (algo == "spectral") return samplers::sample_spectral(k, seed).indices;
  if (algo == "sequential") return samplers::sample_sequential(k, seed).indices;
  if (algo == "thinning") {
    const auto env = samplers::bernoulli_envelope(k);
    return samplers::sample_thinning(k, env, seed).indices;
  }
  throw ContractError("unknown algorithm '" + algo + "'");
}

}  // namespace

PYBIND11_MODULE(_dppcore, m) {
  m.doc() = "Exact determinantal point process sampling";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<kernels::KernelMatrix>(m, "Kernel")
      .def_readonly("matrix", &kernels::KernelMatrix::matrix)
      .def_readonly("provenance", &kernels::KernelMatrix::provenance)
      .def_property_readonly("n", &kernels::KernelMatrix::n)
      .def_property_readonly("expected_cardinality",
                             &kernels::expected_cardinality);

  m.def("kernel_from_matrix", &kernel_from_matrix, py::arg("matrix"),
        "Wrap a Hermitian matrix with spectrum in [0, 1] as a DPP kernel.");
  m.def("random_kernel", &kernels::build_random, py::arg("n"), py::arg("seed"));
  m.def(
      "ginibre_kernel",
      [](int n, double expected_card, uint64_t seed) {
        return kernels::calibrated_kernel(kernels::build_ginibre(n, seed),
                                          expected_card);
      },
      py::arg("n"), py::arg("expected_card"), py::arg("seed") = 0);
  m.def("projection_kernel", &kernels::build_projection, py::arg("n"),
        py::arg("rank"), py::arg("seed"));
  m.def(
      "calibrated_kernel",
      [](const Mat& l, double target) {
        kernels::LEnsemble le;
        le.matrix = numerics::hermitize(l);
        le.provenance = "python matrix";
        return kernels::calibrated_kernel(le, target);
      },
      py::arg("l"), py::arg("expected_card"),
      "Scale an L-ensemble so the induced kernel has the target E|Y|.");

  m.def("sample", &sample_with, py::arg("kernel"), py::arg("algo"),
        py::arg("seed"),
        "Draw one sample; algo is 'spectral', 'sequential' or 'thinning'. "
        "Returns sorted 0-based indices.");
  m.def(
      "bernoulli_envelope",
      [](const kernels::KernelMatrix& k) {
        return samplers::bernoulli_envelope(k).q;
      },
      py::arg("kernel"),
      "Dominating independent-coin probabilities for the thinning sampler.");
  m.def("probability", &samplers::dpp_probability, py::arg("kernel"),
        py::arg("subset"), "P(Y = subset) for 0-based indices.");
  m.def("marginal", &samplers::marginal, py::arg("kernel"), py::arg("contains"),
        py::arg("avoids"), "P(contains subset of Y, avoids disjoint from Y).");
  m.def(
      "enumerate_distribution",
      [](const kernels::KernelMatrix& k) {
        return oracle::enumerate_distribution(k).probabilities;
      },
      py::arg("kernel"),
      "Exhaustive pmf indexed by bitmask (bit i set <=> element i present).");
}
