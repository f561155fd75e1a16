#include "bfb/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "bfb/error.hpp"

namespace bfb {

void SparseSpd::multiply(const FieldVector& x, FieldVector& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      sum += values[k] * x[col_idx[k]];
    }
    y[i] = sum;
  }
}

FieldVector SparseSpd::multiply(const FieldVector& x) const {
  FieldVector y;
  multiply(x, y);
  return y;
}

double SparseSpd::quadratic_form(const FieldVector& x) const {
  return bilinear_form(x, x);
}

double SparseSpd::bilinear_form(const FieldVector& x, const FieldVector& y) const {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      row += values[k] * y[col_idx[k]];
    }
    sum += x[i] * row;
  }
  return sum;
}

FieldVector SparseSpd::diagonal() const {
  FieldVector d(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] == i) {
        d[i] = values[k];
      }
    }
  }
  return d;
}

double SparseSpd::entry(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (col_idx[k] == j) {
      return values[k];
    }
  }
  return 0.0;
}

bool SparseSpd::is_symmetric(double tol) const {
  for (int i = 0; i < n; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (std::abs(values[k] - entry(col_idx[k], i)) > tol) {
        return false;
      }
    }
  }
  return true;
}

void SparseBuilder::add(int i, int j, double v) {
  rows_.push_back(i);
  cols_.push_back(j);
  vals_.push_back(v);
}

SparseSpd SparseBuilder::compress() const {
  const std::size_t m = rows_.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    if (rows_[a] != rows_[b]) return rows_[a] < rows_[b];
    return cols_[a] < cols_[b];
  });

  SparseSpd out;
  out.n = n_;
  out.row_ptr.assign(n_ + 1, 0);
  int last_row = -1;
  for (std::size_t idx = 0; idx < m; ++idx) {
    const std::size_t k = order[idx];
    if (!out.col_idx.empty() && rows_[k] == last_row && cols_[k] == out.col_idx.back()) {
      out.values.back() += vals_[k];
    } else {
      out.col_idx.push_back(cols_[k]);
      out.values.push_back(vals_[k]);
      last_row = rows_[k];
      ++out.row_ptr[rows_[k] + 1];
    }
  }
  for (int i = 0; i < n_; ++i) {
    out.row_ptr[i + 1] += out.row_ptr[i];
  }
  return out;
}

namespace {

struct P1Gradients {
  double area;
  double gx[3];
  double gy[3];
};

P1Gradients triangle_gradients(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.nodes[tri[0]];
  const auto& p1 = mesh.nodes[tri[1]];
  const auto& p2 = mesh.nodes[tri[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  if (!(det > 0.0)) {
    throw Error("assemble: degenerate triangle");
  }
  P1Gradients g;
  g.area = 0.5 * det;
  // grad phi_i is the rotated opposite edge over 2*area
  g.gx[0] = (p1[1] - p2[1]) / det;
  g.gy[0] = (p2[0] - p1[0]) / det;
  g.gx[1] = (p2[1] - p0[1]) / det;
  g.gy[1] = (p0[0] - p2[0]) / det;
  g.gx[2] = (p0[1] - p1[1]) / det;
  g.gy[2] = (p1[0] - p0[0]) / det;
  return g;
}

double edge_length(const Mesh& mesh, const std::array<int, 2>& e) {
  const auto& p = mesh.nodes[e[0]];
  const auto& q = mesh.nodes[e[1]];
  return std::hypot(q[0] - p[0], q[1] - p[1]);
}

} // namespace

SparseSpd assemble_stiffness(const Mesh& mesh) {
  SparseBuilder builder(mesh.node_count());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const P1Gradients g = triangle_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        builder.add(tri[i], tri[j], g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]));
      }
    }
  }
  return builder.compress();
}

SparseSpd assemble_volume_mass(const Mesh& mesh) {
  SparseBuilder builder(mesh.node_count());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0)) {
      throw Error("assemble: degenerate triangle");
    }
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        builder.add(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  return builder.compress();
}

SparseSpd assemble_boundary_mass(const Mesh& mesh, BoundaryTag which) {
  const auto& edges = which == BoundaryTag::Gamma ? mesh.gamma_edges : mesh.sigma_edges;
  SparseBuilder builder(mesh.node_count());
  for (const auto& e : edges) {
    const double len = edge_length(mesh, e);
    builder.add(e[0], e[0], len / 3.0);
    builder.add(e[1], e[1], len / 3.0);
    builder.add(e[0], e[1], len / 6.0);
    builder.add(e[1], e[0], len / 6.0);
  }
  return builder.compress();
}

FieldVector assemble_boundary_load(const Mesh& mesh, double g) {
  if (!std::isfinite(g)) {
    throw Error("assemble_boundary_load: non-finite flux");
  }
  FieldVector load(mesh.node_count(), 0.0);
  for (const auto& e : mesh.sigma_edges) {
    const double half = 0.5 * edge_length(mesh, e);
    load[e[0]] += g * half;
    load[e[1]] += g * half;
  }
  return load;
}

DirichletSystem apply_dirichlet(const SparseSpd& matrix, const FieldVector& rhs,
                                const std::vector<int>& constrained_nodes,
                                double value) {
  if (constrained_nodes.empty()) {
    throw Error("apply_dirichlet: empty constraint set (system singular up to constants)");
  }
  DirichletSystem sys;
  sys.lift_value = value;
  sys.full_to_free.assign(matrix.n, 0);
  for (int node : constrained_nodes) {
    sys.full_to_free[node] = -1;
  }
  for (int i = 0; i < matrix.n; ++i) {
    if (sys.full_to_free[i] == 0) {
      sys.full_to_free[i] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(i);
    } else {
      sys.full_to_free[i] = -1;
    }
  }

  // rhs correction from the constant lifting u0 = value everywhere:
  // reduced_rhs = rhs_free - value * (A * ones)_free.
  const FieldVector a_ones = matrix.multiply(FieldVector(matrix.n, 1.0));

  SparseBuilder builder(static_cast<int>(sys.free_nodes.size()));
  sys.reduced_rhs.resize(sys.free_nodes.size());
  for (std::size_t f = 0; f < sys.free_nodes.size(); ++f) {
    const int i = sys.free_nodes[f];
    sys.reduced_rhs[f] = rhs[i] - value * a_ones[i];
    for (int k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k) {
      const int j = matrix.col_idx[k];
      if (sys.full_to_free[j] >= 0) {
        builder.add(static_cast<int>(f), sys.full_to_free[j], matrix.values[k]);
      }
    }
  }
  sys.reduced = builder.compress();
  return sys;
}

FieldVector DirichletSystem::expand(const FieldVector& reduced_values) const {
  FieldVector full(full_to_free.size(), 0.0);
  for (std::size_t f = 0; f < free_nodes.size(); ++f) {
    full[free_nodes[f]] = reduced_values[f];
  }
  return full;
}

FieldVector DirichletSystem::lifted_solution(const FieldVector& reduced_values) const {
  FieldVector full = expand(reduced_values);
  for (double& v : full) {
    v += lift_value;
  }
  return full;
}

CgResult solve_operator(const LinearOperator& op, const FieldVector& b, double tol,
                        int max_iters) {
  const int n = op.n;
  if (max_iters <= 0) {
    max_iters = 10 * n;
  }
  CgResult result;
  result.x.assign(n, 0.0);

  auto dot = [n](const FieldVector& u, const FieldVector& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };

  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    result.info = {0, 0.0, true};
    return result;
  }

  FieldVector inv_diag(n);
  for (int i = 0; i < n; ++i) {
    inv_diag[i] = op.diag[i] > 0.0 ? 1.0 / op.diag[i] : 1.0;
  }

  FieldVector r = b; // x0 = 0
  FieldVector z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= max_iters; ++it) {
    op.apply(p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0)) {
      throw Error("solve_spd: non-positive curvature, system is not positive definite");
    }
    const double alpha = rz / curvature;
    for (int i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double r_norm = std::sqrt(dot(r, r));
    if (r_norm <= tol * b_norm) {
      result.info = {it, r_norm / b_norm, true};
      return result;
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error("solve_spd: no convergence within the iteration cap");
}

CgResult solve_spd(const SparseSpd& matrix, const FieldVector& b, double tol, int max_iters) {
  LinearOperator op;
  op.n = matrix.n;
  op.apply = [&matrix](const FieldVector& x, FieldVector& y) { matrix.multiply(x, y); };
  op.diag = matrix.diagonal();
  return solve_operator(op, b, tol, max_iters);
}

Forms Forms::assemble(const Mesh& mesh) {
  Forms forms;
  forms.stiffness = assemble_stiffness(mesh);
  forms.volume_mass = assemble_volume_mass(mesh);
  forms.sigma_mass = assemble_boundary_mass(mesh, BoundaryTag::Sigma);
  forms.sigma_weights = forms.sigma_mass.multiply(FieldVector(mesh.node_count(), 1.0));
  return forms;
}

double h1_seminorm(const Forms& forms, const FieldVector& v) {
  return std::sqrt(std::max(0.0, forms.stiffness.quadratic_form(v)));
}

double l2_norm(const Forms& forms, const FieldVector& v) {
  return std::sqrt(std::max(0.0, forms.volume_mass.quadratic_form(v)));
}

double h1_norm(const Forms& forms, const FieldVector& v) {
  return std::sqrt(std::max(0.0, forms.stiffness.quadratic_form(v) +
                                     forms.volume_mass.quadratic_form(v)));
}

double h1_seminorm(const Mesh& mesh, const FieldVector& v) {
  return std::sqrt(std::max(0.0, assemble_stiffness(mesh).quadratic_form(v)));
}

double l2_norm(const Mesh& mesh, const FieldVector& v) {
  return std::sqrt(std::max(0.0, assemble_volume_mass(mesh).quadratic_form(v)));
}

double h1_norm(const Mesh& mesh, const FieldVector& v) {
  const double semi = h1_seminorm(mesh, v);
  const double l2 = l2_norm(mesh, v);
  return std::sqrt(semi * semi + l2 * l2);
}

double trace_integral(const Mesh& mesh, const FieldVector& v, BoundaryTag which) {
  const SparseSpd mass = assemble_boundary_mass(mesh, which);
  return mass.bilinear_form(FieldVector(mesh.node_count(), 1.0), v);
}

double boundary_l2(const Mesh& mesh, const FieldVector& v, BoundaryTag which) {
  const SparseSpd mass = assemble_boundary_mass(mesh, which);
  return std::sqrt(std::max(0.0, mass.quadratic_form(v)));
}

std::string export_matrix(const SparseSpd& matrix) {
  std::ostringstream out;
  char buf[96];
  out << matrix.n << " " << matrix.values.size() << "\n";
  for (int i = 0; i < matrix.n; ++i) {
    for (int k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, matrix.col_idx[k], matrix.values[k]);
      out << buf;
    }
  }
  return out.str();
}

} // namespace bfb
