#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "polarpark/trajectory.hpp"

namespace polarpark {

inline constexpr std::string_view kCsvHeader = "t,x,y,theta,rho,delta,gamma,v,omega,V,zeta,B";

/// One row per sample, 17 significant digits, empty field for NaN.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Rebuilds a trajectory from CSV text. The CSV carries no controller
/// parameters, so the scenario that produced it is supplied as metadata. The
/// termination is Cutoff when the last row has zero inputs at or below the
/// cutoff radius, Horizon otherwise. Derivative columns are not stored and
/// read back as NaN. Throws MalformedInput.
Trajectory read_trajectory_csv(std::istream& in, const Scenario& metadata);

/// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace polarpark
