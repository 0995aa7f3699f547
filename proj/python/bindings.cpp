#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tissuegmm/error.hpp"
#include "tissuegmm/evaluation.hpp"
#include "tissuegmm/geometry2d.hpp"
#include "tissuegmm/mixture.hpp"
#include "tissuegmm/model_file.hpp"
#include "tissuegmm/regression.hpp"
#include "tissuegmm/synth.hpp"
#include "tissuegmm/tissue_frames.hpp"

namespace py = pybind11;
using namespace tissuegmm;

namespace {

// Datapoints as an (n, 4) array of time, x, y, angle.
Eigen::MatrixXd datapoints_array(const TrackSet& tracks, const ClusterSpec& spec) {
  return to_rows(assemble_datapoints(tracks, spec));
}

std::vector<Datapoint> rows_to_datapoints(const Eigen::MatrixXd& rows) {
  if (rows.cols() != 4) fail(ErrorKind::ValidationError, "expected an (n, 4) array");
  std::vector<Datapoint> out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.push_back({rows(i, 0), Vec2(rows(i, 1), rows(i, 2)), rows(i, 3)});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_tissuegmm, m) {
  m.doc() = "Tool pose mixture models in tissue-relative frames";

  static py::exception<Error> error(m, "TissueGmmError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def("wrap_angle", &wrap_angle, py::arg("angle"));
  m.def("slerp_angle", &slerp_angle, py::arg("a"), py::arg("b"), py::arg("s"));
  m.def(
      "relative_angle", [](double frame, double tool) { return relative_angle(Rotation2(frame), Rotation2(tool)); },
      py::arg("frame_angle"), py::arg("tool_angle"));
  m.def(
      "pca_angle",
      [](const std::vector<Vec2>& points, std::optional<Vec2> prev) {
        return pca_rotation(points, prev).angle();
      },
      py::arg("points"), py::arg("prev_axis") = py::none());
  m.def(
      "apply_inverse",
      [](double angle, const Vec2& origin, const Vec2& p) {
        return apply_inverse(Transform2(Rotation2(angle), origin), p);
      },
      py::arg("angle"), py::arg("origin"), py::arg("point"));
  m.def("position_error", &position_error, py::arg("pred"), py::arg("truth"));
  m.def("angle_error", &angle_error, py::arg("pred"), py::arg("truth"));

  py::enum_<ToolPath>(m, "ToolPath")
      .value("line", ToolPath::Line)
      .value("arc", ToolPath::Arc)
      .value("cut_stroke", ToolPath::CutStroke);

  py::class_<SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("frame_count", &SceneConfig::frame_count)
      .def_readwrite("cluster_count", &SceneConfig::cluster_count)
      .def_readwrite("points_per_cluster", &SceneConfig::points_per_cluster)
      .def_readwrite("drift_amplitude", &SceneConfig::drift_amplitude)
      .def_readwrite("rotation_amplitude", &SceneConfig::rotation_amplitude)
      .def_readwrite("noise_sigma", &SceneConfig::noise_sigma)
      .def_readwrite("tool_path", &SceneConfig::tool_path)
      .def_readwrite("seed", &SceneConfig::seed);

  py::class_<TrackSet>(m, "TrackSet")
      .def_property_readonly("frame_count", &TrackSet::frame_count)
      .def("__len__", [](const TrackSet& t) { return t.samples().size(); })
      .def(
          "transformed",
          [](const TrackSet& t, double angle, const Vec2& shift) {
            return transform_tracks(t, Transform2(Rotation2(angle), shift));
          },
          py::arg("angle"), py::arg("translation"))
      .def("__eq__", [](const TrackSet& a, const TrackSet& b) { return a == b; });

  m.def(
      "generate_scene",
      [](const SceneConfig& c) {
        Scene s = generate_scene(c);
        return py::make_tuple(std::move(s.tracks), to_rows(s.ground_truth));
      },
      py::arg("config") = SceneConfig{}, "Returns (tracks, ground_truth) with ground truth as (T, 4).");
  m.def("read_tracks", [](const std::filesystem::path& p) { return parse_tracks(p); }, py::arg("path"));
  m.def("write_tracks", py::overload_cast<const std::filesystem::path&, const TrackSet&>(&write_tracks),
        py::arg("path"), py::arg("tracks"));

  py::class_<ClusterSpec>(m, "ClusterSpec")
      .def(py::init([](const std::string& mode, int k, std::uint64_t seed, double epsilon) {
             ClusterSpec s;
             if (mode == "kmeans") {
               s.mode = ClusterSpec::Mode::KMeans;
             } else if (mode != "labeled") {
               fail(ErrorKind::ConfigError, "mode must be 'labeled' or 'kmeans'");
             }
             s.k = k;
             s.seed = seed;
             s.epsilon = epsilon;
             return s;
           }),
           py::arg("mode") = "labeled", py::arg("k") = 2, py::arg("seed") = 0,
           py::arg("epsilon") = kDefaultClusterEpsilon);

  m.def("assemble_datapoints", &datapoints_array, py::arg("tracks"), py::arg("cluster") = ClusterSpec{},
        "Frame-relative tool poses as an (T, 4) array: time, x, y, angle.");

  py::class_<MixtureModel>(m, "MixtureModel")
      .def(py::init<>())
      .def_readwrite("priors", &MixtureModel::priors)
      .def_readwrite("means", &MixtureModel::means)
      .def_readwrite("covariances", &MixtureModel::covariances)
      .def("__len__", &MixtureModel::size)
      .def(
          "log_likelihood", [](const MixtureModel& mm, const Eigen::MatrixXd& rows) { return mm.log_likelihood(rows); },
          py::arg("rows"))
      .def("validate", &MixtureModel::validate, py::arg("min_eigenvalue") = 0.0);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("components", &TrainConfig::components)
      .def_readwrite("max_iters", &TrainConfig::max_iters)
      .def_readwrite("loglik_tol", &TrainConfig::loglik_tol)
      .def_readwrite("floor", &TrainConfig::floor)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("restarts", &TrainConfig::restarts)
      .def_readwrite("standardize", &TrainConfig::standardize);

  m.def(
      "em_train",
      [](const Eigen::MatrixXd& rows, const TrainConfig& cfg) {
        TrainResult r = em_train(rows, cfg);
        py::dict diag;
        diag["loglik_trace"] = r.diagnostics.loglik_trace;
        diag["best_restart"] = r.diagnostics.best_restart;
        diag["converged"] = r.diagnostics.converged;
        diag["floor_activations"] = r.diagnostics.floor_activations;
        return py::make_tuple(std::move(r.model), r.loglik, diag);
      },
      py::arg("rows"), py::arg("config") = TrainConfig{}, "Returns (model, loglik, diagnostics).");
  m.def(
      "select_components",
      [](const Eigen::MatrixXd& rows, int lo, int hi, const TrainConfig& cfg) {
        SelectionResult s = select_components(rows, lo, hi, cfg);
        std::vector<std::pair<int, double>> table;
        for (const auto& e : s.table) table.emplace_back(e.components, e.bic);
        return py::make_tuple(s.components, std::move(s.best.model), table);
      },
      py::arg("rows"), py::arg("min_components"), py::arg("max_components"),
      py::arg("config") = TrainConfig{}, "Returns (components, model, [(N, bic), ...]).");

  m.def(
      "gmr",
      [](const MixtureModel& mm, double t) {
        const PosePrediction p = gmr(mm, t);
        return py::make_tuple(p.position_mean, p.position_covariance, p.angle);
      },
      py::arg("model"), py::arg("t"), "Returns (mean, covariance, angle).");
  m.def("predict_orientation", &predict_orientation, py::arg("model"), py::arg("t"));

  m.def(
      "evaluate",
      [](const MixtureModel& mm, const Eigen::MatrixXd& rows, int train, int test) {
        const EvalReport r = evaluate(mm, rows_to_datapoints(rows), SplitSpec(train, test));
        py::dict d;
        d["mean_train_pos_px"] = r.mean_train_pos_px;
        d["mean_test_pos_px"] = r.mean_test_pos_px;
        d["mean_train_angle_deg"] = r.mean_train_angle_deg;
        d["mean_test_angle_deg"] = r.mean_test_angle_deg;
        return d;
      },
      py::arg("model"), py::arg("datapoints"), py::arg("train"), py::arg("test"));

  m.def(
      "write_model",
      [](const std::filesystem::path& p, const MixtureModel& mm, int frame_count) {
        ModelFile f;
        f.model = mm;
        f.frame_count = frame_count;
        write_model(p, f);
      },
      py::arg("path"), py::arg("model"), py::arg("frame_count"));
  m.def(
      "read_model", [](const std::filesystem::path& p) {
        ModelFile f = read_model(p);
        return py::make_tuple(std::move(f.model), f.frame_count);
      },
      py::arg("path"), "Returns (model, frame_count).");
}
