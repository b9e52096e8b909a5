#pragma once

/// CSV / legacy-VTK output of cell-centered data and JSON detection reports.

#include <string>

#include "topoflow/detection.hpp"

namespace topoflow {

/// Writes "# grid nx ny lx ly", a "i,j,x,y,value" header, then one row per
/// cell (j outer, i inner) with doubles in %.17g so values round-trip
/// exactly.
void export_scalar_csv(const std::string& path, const ScalarField& f);

/// Inverse of export_scalar_csv. Throws IoError on malformed input.
ScalarField import_scalar_csv(const std::string& path);

/// Legacy-VTK STRUCTURED_POINTS file of cell-center values (ParaView ready).
void export_vtk(const std::string& path, const ScalarField& f, const std::string& name);

/// Same, with the velocity interpolated to cell centers as a VECTORS array.
void export_vtk(const std::string& path, const StaggeredVelocity& u, const std::string& name);

/// Detection report with thresholds, noise model, clusters (argmin cell in
/// index and physical coordinates, extent box and area) and the match score.
std::string report_to_json(const DetectionReport& rep, const Grid& g);
void write_report_json(const std::string& path, const DetectionReport& rep, const Grid& g);

} // namespace topoflow
