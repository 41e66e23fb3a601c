#pragma once

// Text formats around the experiment engine: sweep config files, the
// results CSV, reference-curve overlays, and a gnuplot script tying the
// curves together.

#include <string>
#include <vector>

#include "oas/harness.hpp"

namespace oas {

// Config text is line oriented: `key = value`, `#` starts a comment,
// list values are comma separated. Keys match the ExperimentConfig
// field names; unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// CSV schema: policy,c,M,mse,mse_db,stderr,slots_per_component,trials,seed,status
// with status ok or skipped; skipped rows leave the result fields empty.
std::string results_csv(const std::vector<CellResult>& cells);

// Externally supplied reference curve points, plotted but never computed.
// File schema: compression_ratio,mse_db,label (header required).
struct OverlayPoint {
    double compression_ratio = 0.0;
    double mse_db = 0.0;
    std::string label;
};

std::vector<OverlayPoint> load_overlay_csv(const std::string& path);

// Plot script for the results CSV (one series per (policy, M) pair,
// overlay points inlined), axes compression ratio vs MSE in dB.
std::string gnuplot_script(const std::string& csv_name, const std::vector<CellResult>& cells,
                           const std::vector<OverlayPoint>& overlay);

void write_text_file(const std::string& path, const std::string& content);

} // namespace oas
