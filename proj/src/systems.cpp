#include "roaflow/systems.hpp"

#include <fstream>
#include <sstream>

namespace roaflow {

Vector VectorField::operator()(const Vector& x) const {
  if (x.size() != dimension) {
    throw InputError("system '" + id + "' expects a state of dimension " +
                     std::to_string(dimension) + ", got " + std::to_string(x.size()));
  }
  return eval(x);
}

VectorField van_der_pol_reverse() {
  Matrix a(2, 2);
  a << 0.0, -1.0, 1.0, -1.0;
  return {"vdp_reverse", 2,
          [](const Vector& x) {
            Vector dx(2);
            dx << -x[1], x[0] - (1.0 - x[0] * x[0]) * x[1];
            return dx;
          },
          a};
}

VectorField van_der_pol_forward() {
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 1.0;
  return {"vdp_forward", 2,
          [](const Vector& x) {
            Vector dx(2);
            dx << x[1], -x[0] + (1.0 - x[0] * x[0]) * x[1];
            return dx;
          },
          a};
}

VectorField unbounded_roa_system() {
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, -1.0;
  return {"unbounded", 2,
          [](const Vector& x) {
            Vector dx(2);
            dx << x[1], -x[0] - x[1] + x[0] * x[0] * x[0] / 3.0;
            return dx;
          },
          a};
}

VectorField rational_system() {
  Matrix a(2, 2);
  a << -1.0, 1.0, -1.0, -1.0;
  return {"rational", 2,
          [](const Vector& x) {
            const double q = 1.0 + x[0] * x[0];
            const double d = q * q;
            Vector dx(2);
            dx << -x[0] / d + x[1], -(x[0] + x[1]) / d;
            return dx;
          },
          a};
}

VectorField make_linear_system(std::string id, Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError("linear system matrix must be square and non-empty");
  }
  const int n = static_cast<int>(a.rows());
  return {std::move(id), n, [a](const Vector& x) -> Vector { return a * x; }, a};
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open matrix file '" + path.string() + "'");
  }
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream row(line);
    std::string token;
    while (row >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw InputError("bad matrix entry '" + token + "' in '" + path.string() + "'");
      }
      values.push_back(v);
    }
  }
  const auto count = values.size();
  std::size_t n = 0;
  while ((n + 1) * (n + 1) <= count) {
    ++n;
  }
  if (n == 0 || n * n != count) {
    throw InputError("matrix file '" + path.string() + "' does not hold a square matrix (" +
                     std::to_string(count) + " entries)");
  }
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n + j];
    }
  }
  return m;
}

VectorField lookup_system(std::string_view id) {
  if (id == "vdp_reverse") return van_der_pol_reverse();
  if (id == "unbounded") return unbounded_roa_system();
  if (id == "rational") return rational_system();
  if (id == "vdp_forward") return van_der_pol_forward();
  constexpr std::string_view linear_prefix = "linear:";
  if (id.starts_with(linear_prefix)) {
    const std::filesystem::path file{std::string(id.substr(linear_prefix.size()))};
    return make_linear_system(std::string(id), load_matrix(file));
  }
  throw InputError("unknown system '" + std::string(id) + "'");
}

std::vector<std::string> benchmark_ids() { return {"vdp_reverse", "unbounded", "rational"}; }

Vector eval_field(std::string_view system_id, const Vector& x) { return lookup_system(system_id)(x); }

Matrix jacobian_at_origin(const VectorField& field) {
  if (!field.analytic_jacobian_at_origin) {
    throw InputError("system '" + field.id + "' has no analytic Jacobian (unavailable)");
  }
  return *field.analytic_jacobian_at_origin;
}

Matrix jacobian_at_origin(std::string_view system_id) {
  return jacobian_at_origin(lookup_system(system_id));
}

Matrix finite_difference_jacobian(const VectorField& field, const Vector& at, double step) {
  const auto n = field.dimension;
  Matrix jac(n, n);
  for (int j = 0; j < n; ++j) {
    Vector plus = at;
    Vector minus = at;
    plus[j] += step;
    minus[j] -= step;
    jac.col(j) = (field(plus) - field(minus)) / (2.0 * step);
  }
  return jac;
}

}  // namespace roaflow
