#include "roaflow/curve_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace roaflow {

void write_curve_csv(std::ostream& out, const BoundaryCurve& curve) {
  out << "idx,x1,x2\n" << std::setprecision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << i << ',' << curve.points[i].x() << ',' << curve.points[i].y() << '\n';
  }
}

BoundaryCurve read_curve_csv(std::istream& in) {
  BoundaryCurve curve;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "idx,x1,x2") throw InputError("malformed curve header: '" + line + "'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string idx, x1, x2, extra;
    if (!std::getline(row, idx, ',') || !std::getline(row, x1, ',') || !std::getline(row, x2, ',') ||
        std::getline(row, extra, ',')) {
      throw InputError("ragged curve row: '" + line + "'");
    }
    try {
      curve.points.emplace_back(std::stod(x1), std::stod(x2));
    } catch (const std::exception&) {
      throw InputError("bad number in curve row: '" + line + "'");
    }
  }
  if (!header) throw InputError("malformed curve header: missing");
  return curve;
}

void save_curve(const BoundaryCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_curve_csv(out, curve);
}

BoundaryCurve load_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open curve file '" + path.string() + "'");
  return read_curve_csv(in);
}

void write_history_csv(std::ostream& out, std::span<const FlowSnapshot> history) {
  out << "iter,idx,x1,x2,speed,E,status\n" << std::setprecision(17);
  for (const auto& snap : history) {
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
      const auto& e = snap.energies[i];
      out << snap.iteration << ',' << i << ',' << snap.points[i].x() << ',' << snap.points[i].y()
          << ',' << snap.speeds[i] << ',';
      if (std::isinf(e.value)) {
        out << "inf";
      } else {
        out << e.value;
      }
      out << ',' << to_string(e.status) << '\n';
    }
  }
}

void write_svg(std::ostream& out, std::span<const FlowSnapshot> history,
               const std::optional<BoundaryCurve>& reference) {
  double lo_x = -1, hi_x = 1, lo_y = -1, hi_y = 1;
  const auto grow = [&](const Point& p) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  };
  for (const auto& snap : history) std::for_each(snap.points.begin(), snap.points.end(), grow);
  if (reference) std::for_each(reference->points.begin(), reference->points.end(), grow);
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y);
  lo_x -= pad, hi_x += pad, lo_y -= pad, hi_y += pad;
  const double size = 600.0;
  const double scale = size / std::max(hi_x - lo_x, hi_y - lo_y);
  // SVG y axis points down.
  const auto emit_points = [&](const std::vector<Point>& pts) {
    for (const auto& p : pts) {
      out << (p.x() - lo_x) * scale << ',' << (hi_y - p.y()) * scale << ' ';
    }
  };
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (hi_x - lo_x) * scale
      << "\" height=\"" << (hi_y - lo_y) * scale << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < history.size(); ++k) {
    const bool last = k + 1 == history.size();
    out << "<polygon fill=\"none\" stroke=\"" << (last ? "#c0392b" : "#2e86c1")
        << "\" stroke-width=\"" << (last ? 2 : 1) << "\" points=\"";
    emit_points(history[k].points);
    out << "\"/>\n";
  }
  if (reference) {
    out << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6,4\" points=\"";
    emit_points(reference->points);
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace roaflow
