#pragma once

// CSV and JSON writers. Every file opens with a header carrying the artifact
// version and the complete run configuration: "# key=value" lines for CSV, a
// leading "header" object for JSON.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pspin/anneal.hpp"
#include "pspin/phase_diagram.hpp"
#include "pspin/spectrum.hpp"

namespace pspin::io {

struct RunHeader {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
};

/// Shortest representation that round-trips ("%.17g" trimmed).
std::string format_number(double v);

void write_csv(std::ostream& os, const RunHeader& header, std::span<const std::string> columns,
               const std::vector<std::vector<std::string>>& rows);

// meanfield
void write_slice_csv(std::ostream& os, const RunHeader& header, const InteractionOrder& order, double lambda,
                     const LineScan& scan);
void write_transitions_csv(std::ostream& os, const RunHeader& header, std::span<const Transition> transitions);
void write_slice_json(std::ostream& os, const RunHeader& header, const InteractionOrder& order, double lambda,
                      const SliceScan& scan);

// phasediagram
void write_cells_csv(std::ostream& os, const RunHeader& header, const PhaseDiagram& diagram);
void write_boundaries_json(std::ostream& os, const RunHeader& header, const PhaseDiagram& diagram);

// spectrum
void write_gap_csv(std::ostream& os, const RunHeader& header, const GapCurve& curve);
void write_minima_csv(std::ostream& os, const RunHeader& header, std::span<const GapMinimum> minima);
void write_gap_json(std::ostream& os, const RunHeader& header, const GapCurve& curve,
                    std::span<const GapMinimum> minima, const SmallGapWindow& window);
void write_fits_csv(std::ostream& os, const RunHeader& header, std::span<const ScalingFit> fits);
void write_scaling_json(std::ostream& os, const RunHeader& header, std::span<const GapMinimum> selected,
                        std::span<const ScalingFit> fits);

// anneal
void write_runs_json(std::ostream& os, const RunHeader& header, std::span<const AnnealRun> runs);
void write_series_csv(std::ostream& os, const RunHeader& header, const AnnealRun& run);

// spin_sector
void write_matrix_csv(std::ostream& os, const RunHeader& header, const BandedSymmetricOperator& op);

}  // namespace pspin::io
