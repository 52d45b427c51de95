#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "qkmeans/clustering.hpp"
#include "qkmeans/complexity.hpp"
#include "qkmeans/crosstalk.hpp"
#include "qkmeans/error.hpp"
#include "qkmeans/iqdata.hpp"
#include "qkmeans/metrics.hpp"

namespace py = pybind11;
using namespace qkm;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

DataSet to_dataset(const Matrix& x, const std::optional<std::vector<int>>& labels = std::nullopt) {
    if (x.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const auto n = static_cast<std::size_t>(x.shape(0)), f = static_cast<std::size_t>(x.shape(1));
    std::vector<double> values(x.data(), x.data() + n * f);
    return DataSet(f, std::move(values), labels.value_or(std::vector<int>{}));
}

py::array_t<double> to_array(const DataSet& d) {
    py::array_t<double> out({d.size(), d.n_features()});
    std::copy(d.values().begin(), d.values().end(), out.mutable_data());
    return out;
}

Encoding parse_encoding(const std::string& s) {
    if (s == "amplitude") return Encoding::Amplitude;
    if (s == "angle") return Encoding::Angle;
    throw std::invalid_argument("encoding must be 'amplitude' or 'angle'");
}

DistanceMode parse_mode(const std::string& s) {
    if (s == "exact") return DistanceMode::QuantumExact;
    if (s == "sampled") return DistanceMode::QuantumSampled;
    if (s == "classical") return DistanceMode::ClassicalEuclidean;
    throw std::invalid_argument("mode must be 'exact', 'sampled' or 'classical'");
}

FitConfig make_config(std::size_t k, const std::string& mode, const std::string& encoding, std::uint64_t seed,
                      std::size_t max_iter, double tol, std::size_t circuits_per_job, std::uint64_t shots) {
    FitConfig c;
    c.n_clusters = k;
    c.distance_mode = parse_mode(mode);
    c.encoding = parse_encoding(encoding);
    c.seed = seed;
    c.max_iter = max_iter;
    c.tol = tol;
    c.batch = {circuits_per_job, shots, seed};
    return c;
}

py::dict model_dict(const ClusterModel& m) {
    py::dict d;
    py::array_t<double> centers({m.n_clusters(), m.n_features});
    std::copy(m.cluster_centers.begin(), m.cluster_centers.end(), centers.mutable_data());
    d["cluster_centers"] = centers;
    d["labels"] = m.labels;
    d["inertia_history"] = m.inertia_history;
    d["n_iter"] = m.n_iter;
    d["converged"] = m.converged;
    std::vector<std::size_t> jobs;
    for (const auto& s : m.batch_history) jobs.push_back(s.jobs_submitted);
    d["jobs_per_iteration"] = jobs;
    return d;
}

ClusterModel model_from(const Matrix& centers) {
    ClusterModel m;
    m.n_features = static_cast<std::size_t>(centers.shape(1));
    m.cluster_centers.assign(centers.data(), centers.data() + centers.size());
    return m;
}

std::optional<double> opt(const std::optional<double>& v) { return v; }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "qk-means state discrimination toolkit";
    m.attr("__version__") = "0.1.0";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.def("amplitude_encode", [](const std::vector<double>& v) { return amplitude_encode(v).amplitudes; },
          py::arg("vector"));
    m.def("angle_encode", [](const std::vector<double>& v) { return angle_encode(v).angle; }, py::arg("vector"));

    m.def(
        "swaptest_distance",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::string& mode, std::uint64_t shots,
           std::uint64_t seed, const std::string& encoding) {
            const auto enc = parse_encoding(encoding);
            const DistanceRequest req{encode(x, enc), encode(y, enc), shots};
            const auto exec = parse_mode(mode) == DistanceMode::QuantumSampled ? ExecutionMode::Sampled
                                                                               : ExecutionMode::Exact;
            return estimate_distance(req, {exec, seed});
        },
        py::arg("x"), py::arg("y"), py::arg("mode") = "exact", py::arg("shots") = 1024, py::arg("seed") = 0,
        py::arg("encoding") = "amplitude");

    m.def(
        "batch_distances",
        [](const Matrix& points, const Matrix& centers, const std::string& mode, std::size_t circuits_per_job,
           std::uint64_t shots, std::uint64_t seed) {
            const auto p = to_dataset(points), c = to_dataset(centers);
            std::vector<EncodedPoint> ep, ec;
            for (std::size_t i = 0; i < p.size(); ++i) ep.push_back(amplitude_encode(p.row(i)));
            for (std::size_t i = 0; i < c.size(); ++i) ec.push_back(amplitude_encode(c.row(i)));
            const auto exec = mode == "sampled" ? ExecutionMode::Sampled : ExecutionMode::Exact;
            const auto r = batch_distance_matrix(ep, ec, {circuits_per_job, shots, seed}, exec);
            py::array_t<double> d({p.size(), c.size()});
            std::copy(r.distances.begin(), r.distances.end(), d.mutable_data());
            return py::make_tuple(d, r.stats.jobs_submitted, r.stats.circuits_executed);
        },
        py::arg("points"), py::arg("centers"), py::arg("mode") = "exact", py::arg("circuits_per_job") = 900,
        py::arg("shots") = 1024, py::arg("seed") = 0);

    m.def(
        "fit",
        [](const Matrix& x, std::size_t k, const std::string& mode, const std::string& encoding, std::uint64_t seed,
           std::size_t max_iter, double tol, std::size_t circuits_per_job, std::uint64_t shots) {
            return model_dict(
                fit(to_dataset(x), make_config(k, mode, encoding, seed, max_iter, tol, circuits_per_job, shots)));
        },
        py::arg("x"), py::arg("n_clusters") = 2, py::arg("mode") = "exact", py::arg("encoding") = "amplitude",
        py::arg("seed") = 0, py::arg("max_iter") = 30, py::arg("tol") = 1e-4, py::arg("circuits_per_job") = 900,
        py::arg("shots") = 1024);

    m.def(
        "predict",
        [](const Matrix& centers, const Matrix& x, const std::string& mode, const std::string& encoding) {
            return predict(model_from(centers), to_dataset(x), parse_mode(mode), parse_encoding(encoding));
        },
        py::arg("cluster_centers"), py::arg("x"), py::arg("mode") = "exact", py::arg("encoding") = "amplitude");

    m.def("assignment_fidelity", [](const std::vector<int>& p, const std::vector<int>& t) {
        return assignment_fidelity(p, t);
    });
    m.def("fowlkes_mallows", [](const std::vector<int>& p, const std::vector<int>& t) { return fowlkes_mallows(p, t); });

    m.def(
        "cross_validate",
        [](const Matrix& x, const std::vector<int>& labels, std::size_t k, const std::string& mode,
           std::size_t n_splits, const std::string& metric, std::uint64_t seed) {
            const auto met = metric == "fm" ? Metric::FowlkesMallows : Metric::AssignmentFidelity;
            const auto r = cross_validate(to_dataset(x, labels), make_config(k, mode, "amplitude", seed, 30, 1e-4, 900, 1024),
                                          n_splits, met, seed);
            py::dict d;
            d["per_fold"] = r.per_fold;
            d["mean"] = r.mean;
            d["half_width"] = r.half_width;
            return d;
        },
        py::arg("x"), py::arg("labels"), py::arg("n_clusters") = 2, py::arg("mode") = "exact",
        py::arg("n_splits") = 10, py::arg("metric") = "fidelity", py::arg("seed") = 0);

    m.def("pearson", [](const std::vector<double>& a, const std::vector<double>& b) { return opt(pearson(a, b)); });

    py::class_<IQShotTable>(m, "IQShotTable")
        .def("__len__", &IQShotTable::size)
        .def("pairs",
             [](const IQShotTable& t) {
                 std::vector<std::pair<std::size_t, std::size_t>> out;
                 for (const auto& p : t.pairs()) out.emplace_back(p.first, p.second);
                 return out;
             })
        .def("save", [](const IQShotTable& t, const std::string& path) { save_table(t, path); })
        .def_static("load", [](const std::string& path) { return load_table(path); });

    m.def(
        "synthesize",
        [](std::uint64_t seed, std::size_t shots, std::optional<std::string> model, std::optional<std::string> coupling) {
            return synthesize(model ? load_readout_model(*model) : default_readout_model(),
                              coupling ? load_coupling_map(*coupling) : default_coupling_map(), shots, seed);
        },
        py::arg("seed") = 7, py::arg("shots") = 1024, py::arg("model") = py::none(), py::arg("coupling") = py::none());

    m.def(
        "assemble_datasets",
        [](const IQShotTable& t, std::size_t qubit, std::pair<std::size_t, std::size_t> pair) {
            const auto d = assemble_datasets(t, qubit, {pair.first, pair.second});
            py::dict out;
            out["single"] = py::make_tuple(to_array(d.single), std::vector<int>(d.single.labels().begin(), d.single.labels().end()));
            out["both"] = py::make_tuple(to_array(d.both), std::vector<int>(d.both.labels().begin(), d.both.labels().end()));
            return out;
        },
        py::arg("table"), py::arg("qubit"), py::arg("pair"));

    m.def(
        "analyze_pair",
        [](const IQShotTable& t, std::pair<std::size_t, std::size_t> pair) {
            const auto r = analyze_pair(t, {pair.first, pair.second});
            py::dict out;
            out["labels"] = std::vector<std::string>(r.labels.begin(), r.labels.end());
            std::vector<std::vector<std::optional<double>>> matrix(kArrayCount);
            for (std::size_t a = 0; a < kArrayCount; ++a)
                for (std::size_t b = 0; b < kArrayCount; ++b) matrix[a].push_back(r.at(a, b));
            out["matrix"] = matrix;
            py::dict named;
            for (std::size_t k = 0; k < kNamedCount; ++k) named[py::str(named_coefficients()[k].name())] = r.named[k];
            out["named"] = named;
            return out;
        },
        py::arg("table"), py::arg("pair"));

    m.def(
        "flag_crosstalk",
        [](const IQShotTable& t, double threshold) {
            std::vector<CorrelationReport> reports;
            for (const auto& p : t.pairs()) reports.push_back(analyze_pair(t, p));
            std::vector<std::pair<std::string, std::vector<std::string>>> out;
            for (const auto& f : flag_crosstalk(reports, {}, {threshold, 0.02})) out.emplace_back(f.pair.label(), f.evidence);
            return out;
        },
        py::arg("table"), py::arg("threshold") = 0.1);

    auto params = [](double n, double k, double f, double i, double c) { return ComplexityParams{n, k, f, i, c}; };
    m.def(
        "classical_cost",
        [params](double n, double k, double f, double i) { return classical_cost(params(n, k, f, i, 900)); },
        py::arg("n"), py::arg("k"), py::arg("f"), py::arg("i"));
    m.def(
        "quantum_cost",
        [params](double n, double k, double f, double i, double c) { return quantum_cost(params(n, k, f, i, c)); },
        py::arg("n"), py::arg("k"), py::arg("f"), py::arg("i"), py::arg("c") = 900);
    m.def("expected_jobs_per_iteration", &expected_jobs_per_iteration, py::arg("n"), py::arg("k"),
          py::arg("c") = 900);
}
