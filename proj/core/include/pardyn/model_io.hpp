#pragma once

#include "pardyn/model.hpp"

namespace pardyn {

// Binary model container ("PDYN"): fixed little-endian header, JSON metadata, and a
// packed float64 payload holding every large array (projection records, basis
// trajectories, initial-coefficient data, nodal problem fields).
//
//   bytes 0..3   magic "PDYN"
//   u16          format major version (readers reject larger majors)
//   u16          format minor version
//   u32          flags (bit 0: container carries the basis trajectories g)
//   u64          length of the JSON metadata in bytes
//   ...          JSON metadata (UTF-8); includes the payload directory
//   ...          payload: consecutive float64 arrays
//
// strip_g drops the basis trajectories: the result still supports the mesh-free
// online stage, but field reconstruction and error metrics refuse to run on it.
void save_model(const ReducedModel& model, const std::string& path, bool strip_g = false);
ReducedModel load_model(const std::string& path);

// Human-readable sidecar summary: sizes, anchors, and the build trace.
std::string model_manifest_string(const ReducedModel& model);
void write_model_manifest(const ReducedModel& model, const std::string& path);

// Standalone JSON round-trip for problem definitions (config files). Nodal fields
// are embedded as plain arrays in this form.
std::string problem_to_json_string(const ParametricProblem& problem, int indent = 2);
ParametricProblem problem_from_json_string(const std::string& text);

}  // namespace pardyn
