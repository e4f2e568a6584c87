#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "auvloc/bench.hpp"
#include "auvloc/likelihood.hpp"
#include "auvloc/particle_filter.hpp"
#include "auvloc/sensing.hpp"
#include "auvloc/world.hpp"

namespace py = pybind11;
using namespace auvloc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "2D AUV localization: SIR particle filter with geometric and semantic "
            "measurement models, plus the block-world benchmark harness";

  py::register_exception<MapFormatError>(m, "MapFormatError");
  py::register_exception<DegeneratePoseError>(m, "DegeneratePoseError");

  // --- geometry / world -----------------------------------------------------
  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>())
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y);

  py::class_<Rect>(m, "Rect")
      .def(py::init<>())
      .def_readwrite("min", &Rect::min)
      .def_readwrite("max", &Rect::max)
      .def("width", &Rect::width)
      .def("height", &Rect::height)
      .def("contains", &Rect::contains);

  py::class_<Pose2D>(m, "Pose2D")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("heading"))
      .def_readwrite("x", &Pose2D::x)
      .def_readwrite("y", &Pose2D::y)
      .def_readwrite("heading", &Pose2D::heading)
      .def("__repr__", [](const Pose2D& p) {
        return "Pose2D(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
               std::to_string(p.heading) + ")";
      });

  py::class_<MapObject>(m, "MapObject")
      .def(py::init<>())
      .def_readwrite("id", &MapObject::id)
      .def_readwrite("class_label", &MapObject::class_label)
      .def_readwrite("center", &MapObject::center)
      .def_readwrite("half_extents", &MapObject::half_extents)
      .def("rect", &MapObject::rect);

  py::class_<WorldMap>(m, "WorldMap")
      .def(py::init<>())
      .def_readwrite("bounds", &WorldMap::bounds)
      .def_readwrite("objects", &WorldMap::objects)
      .def("validate", &WorldMap::validate)
      .def("inside_any_object", &WorldMap::inside_any_object)
      .def("diagonal", &WorldMap::diagonal);

  py::class_<VisibleObject>(m, "VisibleObject")
      .def_readonly("id", &VisibleObject::id)
      .def_readonly("class_label", &VisibleObject::class_label)
      .def_readonly("range", &VisibleObject::range)
      .def_readonly("bearing", &VisibleObject::bearing);

  m.def("wrap_angle", &wrap_angle, py::arg("angle"));
  m.def("angle_diff", &angle_diff, py::arg("a"), py::arg("b"));
  m.def("load_map", &load_map, py::arg("path"));
  m.def("write_map", &write_map, py::arg("map"), py::arg("path"));
  m.def("ray_cast", &ray_cast, py::arg("map"), py::arg("origin"), py::arg("bearing"),
        py::arg("max_range"), "First hit distance along the bearing, or None (MISS)");
  m.def("visible_objects", &visible_objects, py::arg("map"), py::arg("pose"), py::arg("fov"),
        py::arg("max_range"), py::arg("occlusion"));

  // --- sensing ----------------------------------------------------------------
  py::class_<SensorConfig>(m, "SensorConfig")
      .def(py::init<>())
      .def_readwrite("fov", &SensorConfig::fov)
      .def_readwrite("max_range", &SensorConfig::max_range)
      .def_readwrite("beam_count", &SensorConfig::beam_count)
      .def_readwrite("sigma_range", &SensorConfig::sigma_range)
      .def_readwrite("sigma_rho", &SensorConfig::sigma_rho)
      .def_readwrite("sigma_theta", &SensorConfig::sigma_theta)
      .def_readwrite("detect_prob", &SensorConfig::detect_prob)
      .def_readwrite("occlusion", &SensorConfig::occlusion)
      .def_readwrite("clutter_rate", &SensorConfig::clutter_rate)
      .def("validate", &SensorConfig::validate);

  py::class_<RangeScan>(m, "RangeScan")
      .def(py::init<>())
      .def_readwrite("bearings", &RangeScan::bearings)
      .def_readwrite("ranges", &RangeScan::ranges)
      .def_readwrite("max_range", &RangeScan::max_range);

  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def(py::init<std::string, double, double>(), py::arg("class_label"), py::arg("range"),
           py::arg("bearing"))
      .def_readwrite("class_label", &Detection::class_label)
      .def_readwrite("range", &Detection::range)
      .def_readwrite("bearing", &Detection::bearing);

  py::class_<SemanticObservation>(m, "SemanticObservation")
      .def(py::init<>())
      .def_readwrite("detections", &SemanticObservation::detections);

  py::class_<RngStream>(m, "RngStream").def(py::init<std::uint64_t>(), py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  m.def("default_geometric_sensor", &default_geometric_sensor);
  m.def("default_semantic_sensor", &default_semantic_sensor);
  m.def("beam_bearings", &beam_bearings, py::arg("cfg"));
  m.def("simulate_range_scan", &simulate_range_scan, py::arg("map"), py::arg("true_pose"),
        py::arg("cfg"), py::arg("rng"));
  m.def("expected_range_scan", &expected_range_scan, py::arg("map"), py::arg("hypothesis"),
        py::arg("cfg"));
  m.def("simulate_semantic_obs", &simulate_semantic_obs, py::arg("map"), py::arg("true_pose"),
        py::arg("cfg"), py::arg("rng"));
  m.def("expected_semantic_obs", &expected_semantic_obs, py::arg("map"), py::arg("hypothesis"),
        py::arg("cfg"));

  // --- likelihood -------------------------------------------------------------
  py::class_<SemanticLikelihoodParams>(m, "SemanticLikelihoodParams")
      .def(py::init<>())
      .def_readwrite("sigma_rho", &SemanticLikelihoodParams::sigma_rho)
      .def_readwrite("sigma_theta", &SemanticLikelihoodParams::sigma_theta)
      .def_readwrite("unmatched_penalty", &SemanticLikelihoodParams::unmatched_penalty)
      .def_readwrite("gate_rho", &SemanticLikelihoodParams::gate_rho)
      .def_readwrite("gate_theta", &SemanticLikelihoodParams::gate_theta);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("pairs", &MatchResult::pairs)
      .def_readonly("matched_count", &MatchResult::matched_count)
      .def_readonly("unmatched_count", &MatchResult::unmatched_count);

  m.def("match_objects", &match_objects, py::arg("observed"), py::arg("expected"),
        py::arg("params"));
  m.def("semantic_likelihood", &semantic_likelihood, py::arg("observed"), py::arg("expected"),
        py::arg("params"));
  m.def("geometric_likelihood", &geometric_likelihood, py::arg("expected"), py::arg("observed"),
        py::arg("sigma_range"));

  // LikelihoodModel crosses the boundary as a plain callable (std::function
  // caster), so python-defined models work in weight_update and step too.
  m.def("make_semantic_model", &make_semantic_model, py::arg("cfg"), py::arg("params"));
  m.def("make_geometric_model", &make_geometric_model, py::arg("cfg"), py::arg("sigma_range"));

  // --- particle filter ----------------------------------------------------------
  py::class_<Particle>(m, "Particle")
      .def(py::init<>())
      .def_readwrite("pose", &Particle::pose)
      .def_readwrite("weight", &Particle::weight);

  py::class_<ParticleSet>(m, "ParticleSet")
      .def(py::init<>())
      .def_readwrite("particles", &ParticleSet::particles)
      .def_readwrite("normalized", &ParticleSet::normalized);

  py::class_<MotionNoise>(m, "MotionNoise")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("sigma_trans"), py::arg("sigma_rot1"),
           py::arg("sigma_rot2"))
      .def_readwrite("sigma_trans", &MotionNoise::sigma_trans)
      .def_readwrite("sigma_rot1", &MotionNoise::sigma_rot1)
      .def_readwrite("sigma_rot2", &MotionNoise::sigma_rot2);

  py::class_<MotionCommand>(m, "MotionCommand")
      .def(py::init<>())
      .def(py::init<double, double, double, MotionNoise>(), py::arg("rot1"), py::arg("trans"),
           py::arg("rot2"), py::arg("noise") = MotionNoise{})
      .def_readwrite("delta_rot1", &MotionCommand::delta_rot1)
      .def_readwrite("delta_trans", &MotionCommand::delta_trans)
      .def_readwrite("delta_rot2", &MotionCommand::delta_rot2)
      .def_readwrite("noise", &MotionCommand::noise);

  py::class_<PoseEstimate>(m, "PoseEstimate")
      .def_readonly("mean", &PoseEstimate::mean)
      .def_readonly("position_variance", &PoseEstimate::position_variance)
      .def_readonly("heading_dispersion", &PoseEstimate::heading_dispersion);

  py::class_<StepDiagnostics>(m, "StepDiagnostics")
      .def_readonly("ess", &StepDiagnostics::ess)
      .def_readonly("degenerate", &StepDiagnostics::degenerate)
      .def_readonly("resampled", &StepDiagnostics::resampled)
      .def_readonly("estimate", &StepDiagnostics::estimate)
      .def_readonly("weight_update_ns", &StepDiagnostics::weight_update_ns);

  m.def("apply_motion", &apply_motion, py::arg("pose"), py::arg("command"));
  m.def("init_uniform", &init_uniform, py::arg("map"), py::arg("count"), py::arg("rng"));
  m.def("predict", &predict, py::arg("set"), py::arg("command"), py::arg("rng"));
  m.def("weight_update", &weight_update, py::arg("set"), py::arg("observation"), py::arg("model"),
        py::arg("map"), "Returns True when the weights degenerated and were reset uniform");
  m.def("effective_sample_size", &effective_sample_size, py::arg("set"));
  m.def("resample_systematic", &resample_systematic, py::arg("set"), py::arg("rng"));
  m.def("estimate", &estimate, py::arg("set"));
  m.def("step", &step, py::arg("set"), py::arg("command"), py::arg("observation"),
        py::arg("model"), py::arg("map"), py::arg("rng"), py::arg("resample_threshold"));

  // --- bench ---------------------------------------------------------------------
  py::enum_<ModelKind>(m, "ModelKind")
      .value("SEMANTIC", ModelKind::kSemantic)
      .value("GEOMETRIC", ModelKind::kGeometric);

  py::class_<TrialConfig>(m, "TrialConfig")
      .def(py::init<>())
      .def_readwrite("map_file", &TrialConfig::map_file)
      .def_readwrite("model", &TrialConfig::model)
      .def_readwrite("particle_count", &TrialConfig::particle_count)
      .def_readwrite("trajectory", &TrialConfig::trajectory)
      .def_readwrite("start_pose", &TrialConfig::start_pose)
      .def_readwrite("init_pose", &TrialConfig::init_pose)
      .def_readwrite("geometric_sensor", &TrialConfig::geometric_sensor)
      .def_readwrite("semantic_sensor", &TrialConfig::semantic_sensor)
      .def_readwrite("semantic_params", &TrialConfig::semantic_params)
      .def_readwrite("sigma_range", &TrialConfig::sigma_range)
      .def_readwrite("resample_threshold", &TrialConfig::resample_threshold)
      .def_readwrite("convergence_threshold", &TrialConfig::convergence_threshold)
      .def_readwrite("seed", &TrialConfig::seed)
      .def("step_count", &TrialConfig::step_count)
      .def("validate", &TrialConfig::validate);

  py::class_<StepMetrics>(m, "StepMetrics")
      .def_readonly("error_m", &StepMetrics::error_m)
      .def_readonly("variance_m2", &StepMetrics::variance_m2)
      .def_readonly("weight_update_ns", &StepMetrics::weight_update_ns);

  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("steps", &RunMetrics::steps)
      .def_readonly("convergence_step", &RunMetrics::convergence_step)
      .def_readonly("final_error_m", &RunMetrics::final_error_m)
      .def_readonly("total_weight_update_ns", &RunMetrics::total_weight_update_ns);

  py::class_<BatchResult>(m, "BatchResult")
      .def_readonly("model", &BatchResult::model)
      .def_readonly("trial_seeds", &BatchResult::trial_seeds)
      .def_readonly("runs", &BatchResult::runs)
      .def_readonly("mean_error_curve", &BatchResult::mean_error_curve)
      .def_readonly("mean_variance_curve", &BatchResult::mean_variance_curve)
      .def_readonly("mean_final_error_m", &BatchResult::mean_final_error_m)
      .def_readonly("mean_weight_update_ns", &BatchResult::mean_weight_update_ns)
      .def_readonly("converged_trials", &BatchResult::converged_trials)
      .def_readonly("mean_convergence_step", &BatchResult::mean_convergence_step);

  py::class_<ComparisonResult>(m, "ComparisonResult")
      .def_readonly("semantic", &ComparisonResult::semantic)
      .def_readonly("geometric", &ComparisonResult::geometric)
      .def_readonly("time_ratio_geometric_over_semantic",
                    &ComparisonResult::time_ratio_geometric_over_semantic);

  m.def("build_block_world", &build_block_world);
  m.def("default_start_pose", &default_start_pose);
  m.def("default_trajectory", &default_trajectory, py::arg("map"));
  m.def("default_motion_noise", &default_motion_noise);
  m.def("default_trial_config", &default_trial_config);
  m.def("load_trial_config", &load_trial_config, py::arg("path"));
  m.def("run_trial", &run_trial, py::arg("cfg"));
  m.def("time_to_convergence", &time_to_convergence, py::arg("variance_series"),
        py::arg("threshold"));
  m.def("run_batch", &run_batch, py::arg("cfg"), py::arg("n_trials"), py::arg("out_dir") = "",
        py::arg("jobs") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("compare_models", &compare_models, py::arg("cfg"), py::arg("n_trials"),
        py::arg("out_dir") = "", py::arg("jobs") = 0, py::call_guard<py::gil_scoped_release>());
}
