#include "roaflow/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace roaflow {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::horizon_reached:
      return "horizon_reached";
    case Termination::converged_to_origin:
      return "converged_to_origin";
    case Termination::escaped:
      return "escaped";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view s) {
  if (s == "horizon_reached") return Termination::horizon_reached;
  if (s == "converged_to_origin") return Termination::converged_to_origin;
  if (s == "escaped") return Termination::escaped;
  throw InputError("unknown termination '" + std::string(s) + "'");
}

double Trajectory::uniform_spacing(double rel_tol) const {
  if (times.size() < 2) {
    throw InputError("trajectory needs at least two samples for a grid spacing");
  }
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double step = times[k] - times[k - 1];
    if (std::abs(step - dt) > rel_tol * std::abs(dt)) {
      throw InputError("trajectory samples are not uniformly spaced");
    }
  }
  return dt;
}

void Trajectory::validate() const {
  if (times.empty()) {
    throw InputError("empty trajectory");
  }
  if (static_cast<std::size_t>(states.cols()) != times.size()) {
    throw InputError("trajectory has " + std::to_string(times.size()) + " times but " +
                     std::to_string(states.cols()) + " states");
  }
  if (derivatives && (derivatives->cols() != states.cols() || derivatives->rows() != states.rows())) {
    throw InputError("trajectory derivatives do not match the states");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw InputError("non-increasing times");
    }
  }
}

Trajectory truncate(const Trajectory& traj, double t_end) {
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end));
  std::size_t keep = 0;
  while (keep < traj.times.size() && traj.times[keep] <= t_end + slack) {
    ++keep;
  }
  if (keep == traj.times.size()) {
    return traj;
  }
  Trajectory out;
  out.times.assign(traj.times.begin(), traj.times.begin() + static_cast<std::ptrdiff_t>(keep));
  out.states = traj.states.leftCols(static_cast<Eigen::Index>(keep));
  if (traj.derivatives) {
    out.derivatives = traj.derivatives->leftCols(static_cast<Eigen::Index>(keep));
  }
  // The cut sits before any stopping event, so the window simply ran out.
  out.termination = Termination::horizon_reached;
  return out;
}

Trajectory derivatives_from_samples(Trajectory traj) {
  traj.validate();
  const auto count = static_cast<Eigen::Index>(traj.size());
  if (count < 3) {
    throw InputError("derivative reconstruction needs at least 3 samples");
  }
  const double dt = traj.uniform_spacing();
  const Matrix& x = traj.states;
  Matrix dx(x.rows(), count);
  for (Eigen::Index k = 1; k + 1 < count; ++k) {
    dx.col(k) = (x.col(k + 1) - x.col(k - 1)) / (2.0 * dt);
  }
  dx.col(0) = (-3.0 * x.col(0) + 4.0 * x.col(1) - x.col(2)) / (2.0 * dt);
  const auto m = count - 1;
  dx.col(m) = (3.0 * x.col(m) - 4.0 * x.col(m - 1) + x.col(m - 2)) / (2.0 * dt);
  traj.derivatives = std::move(dx);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  const int n = traj.dimension();
  out << "# termination=" << to_string(traj.termination) << '\n';
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  if (traj.derivatives) {
    for (int i = 1; i <= n; ++i) out << ",dx" << i;
  }
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    out << traj.times[k];
    for (int i = 0; i < n; ++i) out << ',' << traj.states(i, c);
    if (traj.derivatives) {
      for (int i = 0; i < n; ++i) out << ',' << (*traj.derivatives)(i, c);
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? std::string{}
                                                : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::out_of_range&) {
    // Denormals and overflow still parse to something representable.
    return std::strtod(s.c_str(), nullptr);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') {
      const auto key = line.find("termination=");
      if (key != std::string::npos) {
        auto value = line.substr(key + std::string("termination=").size());
        value.erase(value.find_last_not_of(" \t") + 1);
        traj.termination = termination_from_string(value);
      }
      continue;
    }
    if (header.empty()) {
      header = split_csv(line);
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": ragged row (" +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()) + ")");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, line_no));
    rows.push_back(std::move(row));
  }
  if (header.empty()) {
    throw InputError("malformed header: missing");
  }
  // Header: t, x1..xn, optionally dx1..dxn.
  if (header[0] != "t" || header.size() < 2) {
    throw InputError("malformed header: expected 't,x1,...'");
  }
  std::size_t n = 0;
  while (1 + n < header.size() && header[1 + n] == "x" + std::to_string(n + 1)) ++n;
  if (n == 0) {
    throw InputError("malformed header: no state columns");
  }
  const std::size_t rest = header.size() - 1 - n;
  if (rest != 0 && rest != n) {
    throw InputError("malformed header: derivative columns must match state columns");
  }
  for (std::size_t i = 0; i < rest; ++i) {
    if (header[1 + n + i] != "dx" + std::to_string(i + 1)) {
      throw InputError("malformed header: unexpected column '" + header[1 + n + i] + "'");
    }
  }
  if (rows.empty()) {
    throw InputError("trajectory file has no samples");
  }
  const auto count = static_cast<Eigen::Index>(rows.size());
  const auto dim = static_cast<Eigen::Index>(n);
  traj.times.resize(rows.size());
  traj.states.resize(dim, count);
  if (rest != 0) traj.derivatives = Matrix(dim, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    traj.times[static_cast<std::size_t>(k)] = row[0];
    for (Eigen::Index i = 0; i < dim; ++i) {
      traj.states(i, k) = row[static_cast<std::size_t>(1 + i)];
      if (traj.derivatives) (*traj.derivatives)(i, k) = row[static_cast<std::size_t>(1 + dim + i)];
    }
  }
  traj.validate();
  return traj;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_trajectory_csv(out, traj);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trajectory file '" + path.string() + "'");
  return read_trajectory_csv(in);
}

}  // namespace roaflow
