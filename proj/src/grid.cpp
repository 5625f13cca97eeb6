#include "prolong/grid.hpp"

#include "prolong/exceptions.hpp"

#include <cmath>

namespace prolong {

Grid::Grid(const Eigen::VectorXd& center_, double spacing_, int points_per_axis_)
    : n(static_cast<int>(center_.size())),
      center(center_),
      spacing(spacing_),
      points_per_axis(points_per_axis_) {
  if (spacing <= 0) throw ConfigError("Grid: spacing must be positive");
  if (points_per_axis < 1 || points_per_axis % 2 == 0)
    throw ConfigError("Grid: points_per_axis must be odd and positive");
}

long Grid::total_nodes() const {
  long t = 1;
  for (int a = 0; a < n; ++a) t *= points_per_axis;
  return t;
}

Eigen::VectorXd Grid::node(const std::vector<int>& idx) const {
  Eigen::VectorXd x = center;
  const int half = points_per_axis / 2;
  for (int a = 0; a < n; ++a) x[a] += spacing * (idx[a] - half);
  return x;
}

long Grid::flat_index(const std::vector<int>& idx) const {
  long f = 0;
  for (int a = 0; a < n; ++a) f = f * points_per_axis + idx[a];
  return f;
}

std::vector<int> Grid::unflatten(long flat) const {
  std::vector<int> idx(n);
  for (int a = n - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_per_axis);
    flat /= points_per_axis;
  }
  return idx;
}

bool Grid::has_margin(const std::vector<int>& idx, int margin) const {
  for (int a = 0; a < n; ++a)
    if (idx[a] < margin || idx[a] >= points_per_axis - margin) return false;
  return true;
}

std::vector<std::vector<int>> all_nodes(const Grid& g) {
  std::vector<std::vector<int>> out;
  out.reserve(g.total_nodes());
  for (long f = 0; f < g.total_nodes(); ++f) out.push_back(g.unflatten(f));
  return out;
}

double fd_first(const std::function<double(int)>& s, double h) {
  return (s(-2) - 8.0 * s(-1) + 8.0 * s(1) - s(2)) / (12.0 * h);
}

double fd_second(const std::function<double(int)>& s, double h) {
  return (-s(-2) + 16.0 * s(-1) - 30.0 * s(0) + 16.0 * s(1) - s(2)) / (12.0 * h * h);
}

GridScalarField::GridScalarField(const Grid& g, Eigen::VectorXd vals)
    : grid(g), values(std::move(vals)) {
  if (values.size() != g.total_nodes())
    throw ConfigError("GridScalarField: value count does not match the grid");
}

GridScalarField GridScalarField::sample(const Grid& g,
                                        const std::function<double(const Eigen::VectorXd&)>& f) {
  Eigen::VectorXd vals(g.total_nodes());
  for (long i = 0; i < g.total_nodes(); ++i) vals[i] = f(g.node(g.unflatten(i)));
  return GridScalarField(g, std::move(vals));
}

double GridScalarField::value(const std::vector<int>& idx) const {
  return values[grid.flat_index(idx)];
}

namespace {

void require_margin(const Grid& g, const std::vector<int>& idx, int margin) {
  if (!g.has_margin(idx, margin))
    throw NumericError("stencil margin violated near the grid boundary");
}

} // namespace

Eigen::VectorXd GridScalarField::gradient(const std::vector<int>& idx) const {
  require_margin(grid, idx, 2);
  Eigen::VectorXd out(grid.n);
  for (int a = 0; a < grid.n; ++a) {
    auto s = [&](int o) {
      std::vector<int> j = idx;
      j[a] += o;
      return value(j);
    };
    out[a] = fd_first(s, grid.spacing);
  }
  return out;
}

Eigen::MatrixXd GridScalarField::hessian(const std::vector<int>& idx) const {
  require_margin(grid, idx, 2);
  const int n = grid.n;
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a) {
    auto s = [&](int o) {
      std::vector<int> j = idx;
      j[a] += o;
      return value(j);
    };
    out(a, a) = fd_second(s, grid.spacing);
    for (int b = a + 1; b < n; ++b) {
      auto mixed = [&](int oa) {
        std::vector<int> j = idx;
        j[a] += oa;
        auto inner = [&](int ob) {
          std::vector<int> jj = j;
          jj[b] += ob;
          return value(jj);
        };
        return fd_first(inner, grid.spacing);
      };
      out(a, b) = out(b, a) = fd_first(mixed, grid.spacing);
    }
  }
  return out;
}

std::vector<double> GridScalarField::third_derivatives(const std::vector<int>& idx) const {
  require_margin(grid, idx, 6);
  const int n = grid.n;
  std::vector<double> out;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        auto da = [&](int oa) {
          std::vector<int> j1 = idx;
          j1[a] += oa;
          auto db = [&](int ob) {
            std::vector<int> j2 = j1;
            j2[b] += ob;
            auto dc = [&](int oc) {
              std::vector<int> j3 = j2;
              j3[c] += oc;
              return value(j3);
            };
            return fd_first(dc, grid.spacing);
          };
          return fd_first(db, grid.spacing);
        };
        out.push_back(fd_first(da, grid.spacing));
      }
  return out;
}

ScalarField GridScalarField::as_field() const {
  // Snaps to the nearest node; callers must stay on node positions.
  const GridScalarField copy = *this;
  auto to_index = [copy](const Eigen::VectorXd& x) {
    std::vector<int> idx(copy.grid.n);
    const int half = copy.grid.points_per_axis / 2;
    for (int a = 0; a < copy.grid.n; ++a) {
      const double rel = (x[a] - copy.grid.center[a]) / copy.grid.spacing;
      idx[a] = static_cast<int>(std::lround(rel)) + half;
      if (std::abs(rel - std::lround(rel)) > 1e-9)
        throw NumericError("GridScalarField: evaluation requested off the grid nodes");
      if (idx[a] < 0 || idx[a] >= copy.grid.points_per_axis)
        throw NumericError("GridScalarField: evaluation outside the grid");
    }
    return idx;
  };
  ScalarField f;
  f.value = [copy, to_index](const Eigen::VectorXd& x) { return copy.value(to_index(x)); };
  f.grad = [copy, to_index](const Eigen::VectorXd& x) { return copy.gradient(to_index(x)); };
  f.hess = [copy, to_index](const Eigen::VectorXd& x) { return copy.hessian(to_index(x)); };
  return f;
}

} // namespace prolong
