#pragma once

#include <functional>
#include <vector>

#include "bfb/geometry.hpp"

namespace bfb {

/// Nodal coefficients of a P1 finite-element function on a given Mesh.
using FieldVector = std::vector<double>;

/// Symmetric sparse matrix in compressed-row form. Symmetry is exact by
/// construction (both triangles are assembled from the same symmetric
/// element matrices).
struct SparseSpd {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  void multiply(const FieldVector& x, FieldVector& y) const; // y = A x
  FieldVector multiply(const FieldVector& x) const;
  double quadratic_form(const FieldVector& x) const;          // x^T A x
  double bilinear_form(const FieldVector& x, const FieldVector& y) const;
  FieldVector diagonal() const;
  double entry(int i, int j) const; // 0 if not stored

  bool is_symmetric(double tol = 0.0) const;
};

/// Triplet accumulator for assembly.
class SparseBuilder {
public:
  explicit SparseBuilder(int n) : n_(n) {}
  void add(int i, int j, double v);
  SparseSpd compress() const;

private:
  int n_;
  std::vector<int> rows_, cols_;
  std::vector<double> vals_;
};

/// Stiffness matrix: (i,j) entry = sum over triangles of the exact P1
/// integral of grad(phi_i) . grad(phi_j). Row sums vanish (constants lie
/// in the kernel). Throws on a degenerate triangle.
SparseSpd assemble_stiffness(const Mesh& mesh);

/// Exact P1 volume mass matrix, per triangle (area/12)[[2,1,1],[1,2,1],[1,1,2]].
SparseSpd assemble_volume_mass(const Mesh& mesh);

/// Boundary mass matrix on the tagged edge loop: per edge of length L the
/// 2x2 block (L/6)[[2,1],[1,2]]; rows of non-boundary nodes are empty.
SparseSpd assemble_boundary_mass(const Mesh& mesh, BoundaryTag which = BoundaryTag::Sigma);

/// Load vector for a constant flux g on Sigma: entry i = g * (half the total
/// length of Sigma edges incident to node i).
FieldVector assemble_boundary_load(const Mesh& mesh, double g);

/// Eliminated Dirichlet system with constant lifting: the returned system
/// solves for the lifted part w (w = 0 on the constrained set), with
/// reduced_rhs = rhs_free - lift_value * (A * ones)_free. The full solution
/// is u = w + lift_value at every node.
struct DirichletSystem {
  SparseSpd reduced;
  FieldVector reduced_rhs;
  std::vector<int> free_nodes;   // reduced index -> full index
  std::vector<int> full_to_free; // -1 for constrained nodes
  double lift_value = 0.0;

  /// Scatter reduced coefficients into a full-length vector, zero on the
  /// constrained set (the lifted part w).
  FieldVector expand(const FieldVector& reduced_values) const;
  /// w + lift_value at every node.
  FieldVector lifted_solution(const FieldVector& reduced_values) const;
};

DirichletSystem apply_dirichlet(const SparseSpd& matrix, const FieldVector& rhs,
                                const std::vector<int>& constrained_nodes,
                                double value);

struct SolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CgResult {
  FieldVector x;
  SolveInfo info;
};

/// Matrix-free operator for the iterative solver: y = A x plus the diagonal
/// used by the Jacobi preconditioner.
struct LinearOperator {
  int n = 0;
  std::function<void(const FieldVector&, FieldVector&)> apply;
  FieldVector diag;
};

/// Jacobi-preconditioned conjugate gradients. max_iters = 0 selects the
/// default cap of 10*n. Throws bfb::Error on non-convergence or on
/// non-positive curvature (indefinite/singular system).
CgResult solve_spd(const SparseSpd& matrix, const FieldVector& b, double tol = 1e-10,
                   int max_iters = 0);
CgResult solve_operator(const LinearOperator& op, const FieldVector& b, double tol = 1e-10,
                        int max_iters = 0);

/// Assembled forms for one mesh, shared by the state solvers and the audit.
struct Forms {
  SparseSpd stiffness;
  SparseSpd volume_mass;
  SparseSpd sigma_mass;
  FieldVector sigma_weights; // sigma_mass * ones; entry i = exact integral of phi_i over Sigma

  static Forms assemble(const Mesh& mesh);
};

double h1_seminorm(const Forms& forms, const FieldVector& v);
double l2_norm(const Forms& forms, const FieldVector& v);
double h1_norm(const Forms& forms, const FieldVector& v);

double h1_seminorm(const Mesh& mesh, const FieldVector& v);
double l2_norm(const Mesh& mesh, const FieldVector& v);
double h1_norm(const Mesh& mesh, const FieldVector& v);

/// Integral of v over the tagged boundary (1^T M_b v) and the boundary L2
/// norm (sqrt(v^T M_b v)).
double trace_integral(const Mesh& mesh, const FieldVector& v, BoundaryTag which = BoundaryTag::Sigma);
double boundary_l2(const Mesh& mesh, const FieldVector& v, BoundaryTag which = BoundaryTag::Sigma);

/// Coordinate text export ("i j value" per stored entry) for debugging.
std::string export_matrix(const SparseSpd& matrix);

} // namespace bfb
