#include "desslab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace desslab {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

Json json_number(double value) {
  if (std::isfinite(value)) return value;
  return format_number(value);
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) { write_text(path, render_csv(table)); }

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable t;
  t.header = {"n", "a", "q", "d", "mode", "cost_per_node", "cost_total", "stabilizable", "closed_loop_radius"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.params.n), format_number(r.params.a), std::to_string(r.params.q),
                      std::to_string(r.params.d), std::string(to_string(r.params.mode)), format_number(r.cost_per_node),
                      format_number(r.cost_total), r.stabilizable ? "true" : "false",
                      r.closed_loop_radius ? format_number(*r.closed_loop_radius) : ""});
  }
  return t;
}

CsvTable breakpoint_table(const std::vector<BreakPoint>& points) {
  CsvTable t;
  t.header = {"n", "q", "a_analytic", "a_empirical", "gap"};
  for (const auto& p : points) {
    t.rows.push_back({std::to_string(p.n), std::to_string(p.q), format_number(p.a_analytic),
                      format_number(p.a_empirical), format_number(p.gap)});
  }
  return t;
}

CsvTable ablation_table(const std::vector<AblationReport>& reports) {
  CsvTable t;
  t.header = {"n",
              "a",
              "d",
              "mode",
              "intact_status",
              "intact_cost_per_node",
              "intact_classification",
              "intact_empirical_cost",
              "ablated_classification",
              "ablated_empirical_cost",
              "ablated_radius",
              "ablated_early_peak",
              "alternation_detected"};
  for (const auto& r : reports) {
    t.rows.push_back({std::to_string(r.spec.n), format_number(r.spec.a), std::to_string(r.sensors.d),
                      std::string(to_string(r.sensors.mode)), std::string(to_string(r.intact_status)),
                      format_number(r.intact_cost_per_node), r.intact.label(), format_number(r.intact_empirical_cost),
                      r.ablated.label(), format_number(r.ablated_empirical_cost), format_number(r.ablated_radius),
                      format_number(r.ablated_early_peak), r.alternation_detected ? "true" : "false"});
  }
  return t;
}

CsvTable matrix_table(const Matrix& m) {
  CsvTable t;
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back("c_" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_number(m(i, j)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Json to_json(const BreakPoint& bp) {
  Json j;
  j["n"] = bp.n;
  j["q"] = bp.q;
  j["a_analytic"] = json_number(bp.a_analytic);
  j["a_empirical"] = json_number(bp.a_empirical);
  j["gap"] = json_number(bp.gap);
  return j;
}

Json to_json(const AblationReport& r) {
  Json j;
  j["n"] = r.spec.n;
  j["a"] = r.spec.a;
  j["d"] = r.sensors.d;
  j["mode"] = to_string(r.sensors.mode);
  j["horizon"] = r.horizon;
  j["intact_status"] = to_string(r.intact_status);
  j["intact_cost_per_node"] = json_number(r.intact_cost_per_node);
  j["intact_classification"] = r.intact.label();
  j["intact_empirical_cost"] = json_number(r.intact_empirical_cost);
  j["ablated_classification"] = r.ablated.label();
  j["ablated_empirical_cost"] = json_number(r.ablated_empirical_cost);
  j["ablated_radius"] = json_number(r.ablated_radius);
  j["ablated_early_peak"] = json_number(r.ablated_early_peak);
  j["alternation_detected"] = r.alternation_detected;
  j["ablated_stabilizing"] = r.ablated_stabilizing();
  return j;
}

namespace {

std::string hex_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  } else if (t < 0) {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_heatmap_svg(const Matrix& m, const HeatmapOptions& opts) {
  if (opts.cell_px < 1) throw std::invalid_argument("cell_px must be >= 1");
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const int cell = opts.cell_px;
  const int left = 60, top = 40, bottom = 50;
  const int width = left + cols * cell + 20;
  const int height = top + rows * cell + bottom;

  Matrix v = m;
  int clipped = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      double& x = v(i, j);
      if (std::isnan(x)) {
        x = 0.0;
        ++clipped;
      } else if (std::abs(x) > opts.clip) {
        x = std::copysign(opts.clip, x);
        ++clipped;
      }
    }
  }

  double lo = 0.0, hi = 0.0;
  if (v.size() > 0) {
    lo = v.minCoeff();
    hi = v.maxCoeff();
  }
  if (opts.symmetric_scale) {
    hi = std::max(std::abs(lo), std::abs(hi));
    lo = -hi;
  }
  auto scale = [&](double x) {
    if (hi <= lo) return 0.0;
    return 2.0 * (x - lo) / (hi - lo) - 1.0;
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  if (!opts.title.empty()) s << "<text x=\"" << left << "\" y=\"20\">" << escape(opts.title) << "</text>\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      s << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell << "\" width=\"" << cell << "\" height=\""
        << cell << "\" fill=\"" << hex_color(scale(v(i, j))) << "\"/>\n";
    }
  }
  const int x0 = left, x1 = left + cols * cell;
  if (opts.block_rows > 0 && rows > 0) {
    for (int r = opts.block_rows; r < rows; r += opts.block_rows) {
      const int y = top + r * cell;
      s << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x1 << "\" y2=\"" << y
        << "\" stroke=\"#2a9d3a\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\"/>\n";
    }
    s << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\"" << cols * cell << "\" height=\""
      << std::min(opts.block_rows, rows) * cell << "\" fill=\"none\" stroke=\"#2a9d3a\" stroke-width=\"2\"/>\n";
  }
  s << "<text x=\"" << left + cols * cell / 2 << "\" y=\"" << top + rows * cell + 20 << "\" text-anchor=\"middle\">"
    << escape(opts.col_label) << "</text>\n";
  s << "<text x=\"15\" y=\"" << top + rows * cell / 2 << "\" transform=\"rotate(-90 15 " << top + rows * cell / 2
    << ")\" text-anchor=\"middle\">" << escape(opts.row_label) << "</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << top + rows * cell + 38 << "\">scale [" << format_number(lo) << ", "
    << format_number(hi) << "]";
  if (clipped > 0) s << "; " << clipped << " entries clipped at +-" << format_number(opts.clip);
  s << "</text>\n</svg>\n";
  return s.str();
}

void emit_heatmap_svg(const Matrix& m, const std::filesystem::path& path, const HeatmapOptions& opts) {
  write_text(path, render_heatmap_svg(m, opts));
}

}  // namespace desslab
