#include "mgf/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mgf/error.hpp"

namespace mgf {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ConfigError, "cannot write " + path);
  for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  out << "\n";
  const std::size_t rows = t.columns.empty() ? 0 : t.columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << format_number(t.columns[c][r]);
    out << "\n";
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedCsv, "cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw Error(Errc::MalformedCsv, path + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.assign(t.header.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= t.header.size()) throw Error(Errc::MalformedCsv, "too many fields");
      try {
        t.columns[c++].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(Errc::MalformedCsv, "non-numeric field '" + cell + "'");
      }
    }
    if (c != t.header.size()) throw Error(Errc::MalformedCsv, "row with missing fields");
  }
  if (t.columns.empty() || t.columns[0].empty()) throw Error(Errc::MalformedCsv, path + " has no data rows");
  return t;
}

CsvTable states_table(const MetricGraph& g, const DiscreteSystem& sys, const Trajectory& traj) {
  CsvTable t;
  t.header.push_back("t");
  t.columns.push_back(traj.times);
  for (Index i = 0; i < sys.dim(); ++i) {
    t.header.push_back(slot_label(g, sys.layout().slots[static_cast<std::size_t>(i)]));
    const Eigen::VectorXd row = traj.states.row(i).transpose();
    t.columns.emplace_back(row.data(), row.data() + row.size());
  }
  return t;
}

CsvTable entropy_table(const DiscreteSystem& sys, const Trajectory& traj) {
  CsvTable t{{"t", "value"}, {traj.times, {}}};
  for (std::size_t i = 0; i < traj.size(); ++i) t.columns[1].push_back(relative_entropy(sys, traj.state(i)));
  return t;
}

nlohmann::json layout_json(const MetricGraph& g, const DiscreteSystem& sys) {
  nlohmann::json slots = nlohmann::json::array();
  const StateLayout& L = sys.layout();
  for (std::size_t i = 0; i < L.slots.size(); ++i) {
    const Slot& s = L.slots[i];
    const char* kind = s.kind == SlotKind::Vertex     ? "vertex"
                       : s.kind == SlotKind::Cell     ? "cell"
                       : s.kind == SlotKind::EdgeSlot ? "edge"
                                                      : "patch";
    const std::string id = s.kind == SlotKind::Cell || s.kind == SlotKind::EdgeSlot ? g.edge(s.id).id
                                                                                     : g.vertex_ids()[s.id];
    slots.push_back({{"slot", i}, {"kind", kind}, {"id", id}, {"k", s.k}, {"weight", L.weights[static_cast<Index>(i)]}});
  }
  return {{"system", system_kind_name(sys.kind())}, {"dim", sys.dim()}, {"n", sys.n()}, {"slots", slots}};
}

nlohmann::json report_json(const FunctionalReport& rep) {
  return {{"L_n", rep.L_n},
          {"entropy_initial", rep.entropy.front()},
          {"entropy_final", rep.entropy.back()},
          {"dissipation",
           {{"edge_rate", rep.breakdown.edge_rate},
            {"edge_slope", rep.breakdown.edge_slope},
            {"jump_rate", rep.breakdown.jump_rate},
            {"jump_slope", rep.breakdown.jump_slope},
            {"total", rep.breakdown.total()}}}};
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_svg(const CsvTable& t, const PlotOptions& opt) {
  if (t.columns.size() < 2 || t.columns[0].empty()) throw Error(Errc::MalformedCsv, "nothing to plot");
  auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  auto usable_x = [&](double x) { return std::isfinite(x) && (!opt.log_x || x > 0.0); };
  auto usable_y = [&](double y) { return std::isfinite(y) && (!opt.log_y || y > 0.0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t c = 1; c < t.columns.size(); ++c)
    for (std::size_t r = 0; r < t.columns[c].size(); ++r) {
      const double x = t.columns[0][r], y = t.columns[c][r];
      if (!usable_x(x) || !usable_y(y)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!(x1 >= x0) || !(y1 >= y0)) throw Error(Errc::MalformedCsv, "no plottable points");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double L = 70, R = 160, T = 40, B = 50;
  const double W = opt.width - L - R, H = opt.height - T - B;
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * W; };
  auto py = [&](double y) { return T + H - (ty(y) - y0) / (y1 - y0) * H; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
    << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s << "<text x=\"" << L + W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(opt.title)
      << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W << "\" height=\"" << H
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
    const double gx = L + W * i / 5.0, gy = T + H - H * i / 5.0;
    const double vx = opt.log_x ? std::pow(10.0, fx) : fx, vy = opt.log_y ? std::pow(10.0, fy) : fy;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.3g", vx);
    std::snprintf(by, sizeof by, "%.3g", vy);
    s << "<line x1=\"" << gx << "\" y1=\"" << T + H << "\" x2=\"" << gx << "\" y2=\"" << T + H + 5
      << "\" stroke=\"black\"/><text x=\"" << gx << "\" y=\"" << T + H + 18 << "\" text-anchor=\"middle\">" << bx
      << "</text>\n";
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << gy << "\" x2=\"" << L << "\" y2=\"" << gy
      << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << by
      << "</text>\n";
  }
  s << "<text x=\"" << L + W / 2 << "\" y=\"" << opt.height - 12 << "\" text-anchor=\"middle\">"
    << escape_xml(opt.x_label) << "</text>\n";
  if (!opt.y_label.empty())
    s << "<text x=\"16\" y=\"" << T + H / 2 << "\" transform=\"rotate(-90 16 " << T + H / 2
      << ")\" text-anchor=\"middle\">" << escape_xml(opt.y_label) << "</text>\n";

  for (std::size_t c = 1; c < t.columns.size(); ++c) {
    const char* color = kPalette[(c - 1) % (sizeof kPalette / sizeof *kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < t.columns[c].size(); ++r) {
      const double x = t.columns[0][r], y = t.columns[c][r];
      if (usable_x(x) && usable_y(y)) s << px(x) << "," << py(y) << " ";
    }
    s << "\"/>\n";
    const double ly = T + 14.0 + 18.0 * static_cast<double>(c - 1);
    s << "<line x1=\"" << L + W + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + W + 36 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << L + W + 42 << "\" y=\"" << ly << "\">"
      << escape_xml(t.header[c]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void plot_csv(const std::string& csv_path, const std::string& svg_path, const PlotOptions& opt) {
  const CsvTable t = read_csv(csv_path);
  const std::string svg = render_svg(t, opt);
  std::ofstream out(svg_path);
  if (!out) throw Error(Errc::ConfigError, "cannot write " + svg_path);
  out << svg;
}

}  // namespace mgf
