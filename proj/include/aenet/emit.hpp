#pragma once

// CSV / JSON / SVG output of sweep results.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aenet/experiments.hpp"

namespace aenet {

/// Provenance written at the top of every emitted file.
struct Provenance {
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  bool desk_scale = false;

  static Provenance of(const ExperimentConfig& cfg);
  std::string comment() const;  // "# config=... seed=... scale=..."
};

// CSV files start with the provenance comment; readers skip '#' lines.
// Doubles are written with 17 significant digits so reimport is exact.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                       const Provenance& prov);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                       const Provenance& prov);
std::vector<CellSummary> read_summary_csv(std::istream& in);
void write_table_csv(std::ostream& out, const Table& t, const Provenance& prov);
Table read_table_csv(std::istream& in);

/// Methods as rows and reduced dimensions as columns, cells "mean (std)" of
/// the relative test error in percent with one decimal.
void write_comparison_table(std::ostream& out, const std::vector<CellSummary>& cells,
                            const Provenance& prov);

void write_json(std::ostream& out, const SweepResult& result, const ExperimentConfig& cfg);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;   // optional, same length as y
  std::vector<double> color;  // optional per-point values for scatter coloring
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  bool scatter = false;
};

void write_svg_plot(std::ostream& out, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series, const Provenance& prov);

struct EmitFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

/// Writes result tables under output_dir/tables and curves, auxiliary
/// tables and plots under output_dir/series. Returns the files written.
std::vector<std::filesystem::path> emit_outputs(const SweepResult& result,
                                                const ExperimentConfig& cfg,
                                                EmitFormats formats = {});

/// Re-renders the plots of a sweep from its summary CSV (and auxiliary
/// tables, when present) under output_dir.
std::vector<std::filesystem::path> render_plots_from_files(const std::filesystem::path& output_dir,
                                                           const std::string& sweep);

}  // namespace aenet
