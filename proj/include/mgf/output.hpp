#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mgf/experiments.hpp"

namespace mgf {

// 17 significant digits, '.' decimal separator.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

CsvTable states_table(const MetricGraph& g, const DiscreteSystem& sys, const Trajectory& traj);
CsvTable entropy_table(const DiscreteSystem& sys, const Trajectory& traj);

nlohmann::json layout_json(const MetricGraph& g, const DiscreteSystem& sys);
nlohmann::json report_json(const FunctionalReport& rep);

struct PlotOptions {
  bool log_x = false;
  bool log_y = false;
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  int width = 720;
  int height = 480;
};

// Line chart of every non-t column against the first column.
std::string render_svg(const CsvTable& table, const PlotOptions& opt);
void plot_csv(const std::string& csv_path, const std::string& svg_path, const PlotOptions& opt);

}  // namespace mgf
