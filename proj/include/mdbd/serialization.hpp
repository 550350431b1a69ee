#pragma once

#include <string>

#include "mdbd/integrator.hpp"

namespace mdbd {

/// JSON document for an instance (matrices row-major, family + seed
/// recorded) so oracle and dynamics runs can share the exact problem.
std::string instance_to_json(const NetworkProblem& net, const SlaterCertificate* cert = nullptr);
GeneratedInstance instance_from_json(const std::string& text);

std::string saddle_to_json(const SaddlePoint& sp);
SaddlePoint saddle_from_json(const std::string& text, const NetworkProblem& net);

/// Trajectory CSV: t, agent, block, index, value (blocks x, lambda, mu,
/// omega, nu, y, gamma).
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);

/// Diagnostics CSV: t, V1, kkt_residual, ineq_residual, eq_residual,
/// s_norm, gap.
void write_diagnostics_csv(const std::string& path, const TrajectoryRecord& rec);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mdbd
