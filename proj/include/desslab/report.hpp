#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "desslab/linalg.hpp"
#include "desslab/sweep.hpp"

namespace desslab {

using Json = nlohmann::ordered_json;

/// 9 significant digits, shortest form; `inf`, `-inf`, `nan` for non-finite values.
std::string format_number(double value);

/// Numbers pass through; non-finite values become the strings "inf", "-inf", "nan".
Json json_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

/// Header n,a,q,d,mode,cost_per_node,cost_total,stabilizable,closed_loop_radius.
CsvTable sweep_table(const std::vector<SweepRow>& rows);
CsvTable breakpoint_table(const std::vector<BreakPoint>& points);
CsvTable ablation_table(const std::vector<AblationReport>& reports);
/// Plain matrix dump with columns c_1..c_k.
CsvTable matrix_table(const Matrix& m);

Json to_json(const BreakPoint& bp);
Json to_json(const AblationReport& report);

struct HeatmapOptions {
  bool symmetric_scale = true;
  int cell_px = 14;
  std::string title;
  std::string row_label = "state";
  std::string col_label = "t";
  int block_rows = 0;     // dashed separator every block_rows rows; the first block is outlined solid
  double clip = 1e6;      // entries beyond +-clip (and non-finite ones) are clipped and annotated
};

/// Diverging blue-white-red scale, white at zero.
std::string render_heatmap_svg(const Matrix& m, const HeatmapOptions& opts = {});
void emit_heatmap_svg(const Matrix& m, const std::filesystem::path& path, const HeatmapOptions& opts = {});

}  // namespace desslab
