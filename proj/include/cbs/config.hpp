#pragma once

#include <json.hpp>

#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/fdfd.hpp"
#include "cbs/medium.hpp"
#include "cbs/solver.hpp"

namespace cbs::io {

using Json = nlohmann::ordered_json;

/// One benchmark manifest: model, geometry, source, layers, solver knobs.
/// Field names carry explicit units.
struct RunConfig {
  std::string model_preset = "homogeneous";  // "homogeneous", "three-layer", or "" with model_file
  std::string model_file;                    // CBSF file holding velocity in the real part
  double homogeneous_velocity_mps = 2200.0;

  double frequency_hz = 10.0;
  std::vector<double> frequencies_hz;  // optional sweep; frequency_hz used when empty
  double reference_velocity_mps = 2000.0;

  double width_m = 2000.0;
  double depth_m = 2000.0;
  double dx_m = 10.0;

  double source_x_m = 1000.0;
  double source_y_m = 200.0;
  Complex source_amplitude{1.0, 0.0};

  medium::AblSpec abl;
  solver::SolverConfig solver;
  reference::PmlSpec pml;

  int source_exclusion_cells = 2;
  std::string output_dir = "out";

  double omega() const { return 2.0 * std::numbers::pi * frequency_hz; }
  double k0() const { return omega() / reference_velocity_mps; }
  double lambda_ref_m() const { return reference_velocity_mps / frequency_hz; }

  void validate() const {
    if (!(frequency_hz > 0.0)) throw InvalidParameterError("config: frequency_hz must be > 0");
    for (double f : frequencies_hz)
      if (!(f > 0.0)) throw InvalidParameterError("config: frequencies_hz must be > 0");
    if (!(reference_velocity_mps > 0.0))
      throw InvalidParameterError("config: reference_velocity_mps must be > 0");
    if (!(width_m > 0.0 && depth_m > 0.0 && dx_m > 0.0))
      throw InvalidParameterError("config: domain dimensions must be > 0");
    abl.validate();
    solver.validate();
    pml.validate();
  }
};

inline Json to_json(const RunConfig& c) {
  Json j;
  Json model;
  if (!c.model_file.empty()) {
    model["file"] = c.model_file;
  } else {
    model["preset"] = c.model_preset;
    if (c.model_preset == "homogeneous") model["velocity_mps"] = c.homogeneous_velocity_mps;
  }
  j["model"] = model;
  j["frequency_hz"] = c.frequency_hz;
  if (!c.frequencies_hz.empty()) j["frequencies_hz"] = c.frequencies_hz;
  j["reference_velocity_mps"] = c.reference_velocity_mps;
  j["domain"] = Json{{"width_m", c.width_m}, {"depth_m", c.depth_m}, {"dx_m", c.dx_m}};
  j["source"] = Json{{"x_m", c.source_x_m},
                     {"y_m", c.source_y_m},
                     {"amplitude", Json::array({c.source_amplitude.real(), c.source_amplitude.imag()})}};
  j["abl"] = Json{{"thickness_wavelengths", c.abl.thickness_wavelengths},
                  {"q_inv_max", c.abl.q_inv_max},
                  {"taper", "cosine_squared"}};
  j["solver"] = Json{{"epsilon_factor", c.solver.epsilon_factor},
                     {"max_iterations", c.solver.max_iterations},
                     {"tolerance", c.solver.tolerance},
                     {"divergence_threshold", c.solver.divergence_threshold}};
  j["pml"] = Json{{"thickness_cells", c.pml.thickness_cells},
                  {"sigma_max", c.pml.sigma_max},
                  {"profile_order", c.pml.profile_order}};
  j["error_mask"] = Json{{"source_exclusion_cells", c.source_exclusion_cells}};
  j["output_dir"] = c.output_dir;
  return j;
}

inline RunConfig config_from_json(const Json& j) {
  RunConfig c;
  if (j.contains("model")) {
    const Json& m = j.at("model");
    if (m.contains("file")) {
      c.model_file = m.at("file").get<std::string>();
      c.model_preset.clear();
    } else if (m.contains("preset")) {
      c.model_preset = m.at("preset").get<std::string>();
    }
    if (m.contains("velocity_mps")) c.homogeneous_velocity_mps = m.at("velocity_mps").get<double>();
  }
  c.frequency_hz = j.value("frequency_hz", c.frequency_hz);
  if (j.contains("frequencies_hz")) c.frequencies_hz = j.at("frequencies_hz").get<std::vector<double>>();
  c.reference_velocity_mps = j.value("reference_velocity_mps", c.reference_velocity_mps);
  if (j.contains("domain")) {
    const Json& d = j.at("domain");
    c.width_m = d.value("width_m", c.width_m);
    c.depth_m = d.value("depth_m", c.depth_m);
    c.dx_m = d.value("dx_m", c.dx_m);
  }
  if (j.contains("source")) {
    const Json& s = j.at("source");
    c.source_x_m = s.value("x_m", c.source_x_m);
    c.source_y_m = s.value("y_m", c.source_y_m);
    if (s.contains("amplitude")) {
      const auto a = s.at("amplitude");
      c.source_amplitude = Complex(a.at(0).get<double>(), a.at(1).get<double>());
    }
  }
  if (j.contains("abl")) {
    const Json& a = j.at("abl");
    c.abl.thickness_wavelengths = a.value("thickness_wavelengths", c.abl.thickness_wavelengths);
    c.abl.q_inv_max = a.value("q_inv_max", c.abl.q_inv_max);
    if (a.contains("taper") && a.at("taper").get<std::string>() != "cosine_squared")
      throw InvalidParameterError("config: unknown taper kind");
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    c.solver.epsilon_factor = s.value("epsilon_factor", c.solver.epsilon_factor);
    c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
    c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
    c.solver.divergence_threshold = s.value("divergence_threshold", c.solver.divergence_threshold);
  }
  if (j.contains("pml")) {
    const Json& p = j.at("pml");
    c.pml.thickness_cells = p.value("thickness_cells", c.pml.thickness_cells);
    c.pml.sigma_max = p.value("sigma_max", c.pml.sigma_max);
    c.pml.profile_order = p.value("profile_order", c.pml.profile_order);
  }
  if (j.contains("error_mask"))
    c.source_exclusion_cells =
        j.at("error_mask").value("source_exclusion_cells", c.source_exclusion_cells);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.validate();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_config: cannot open " + path.string());
  Json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("load_config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

inline void save_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream os(path);
  if (!os) throw IoError("save_config: cannot open " + path.string());
  os << to_json(c).dump(2) << '\n';
}

}  // namespace cbs::io
