#pragma once

#include <array>
#include <string>
#include <vector>

namespace bfb {

/// One Fourier mode of the outer boundary radius. For k = 0 only cos_k is
/// meaningful (cos 0*theta = 1); sin_0 is carried but never contributes.
struct FourierCoeff {
  double cos_k = 0.0;
  double sin_k = 0.0;
};

/// Annular domain between a fixed inner circle Gamma (radius a, centered at
/// the origin) and a star-shaped outer boundary Sigma given by the radial
/// graph rho(theta) = cos_0 + sum_k (cos_k cos k*theta + sin_k sin k*theta).
/// The whole annulus is required to sit inside the hold-all disk of radius
/// holdall_radius.
struct DomainSpec {
  double inner_radius = 1.0;
  std::vector<FourierCoeff> fourier;
  double holdall_radius = 5.0;

  double outer_radius(double theta) const;       // rho(theta)
  double outer_radius_deriv(double theta) const; // d rho / d theta

  /// Area of the hold-all disk, pi * R_U^2.
  double holdall_area() const;
};

/// Constructs a DomainSpec without checking admissibility (that is a
/// separate operation). Throws bfb::Error on non-finite coefficients or
/// a <= 0 or holdall_radius <= a.
DomainSpec build_domain(double inner_radius, std::vector<FourierCoeff> fourier,
                        double holdall_radius);

/// Explicit caps standing in for an admissible-domain class: minimum
/// annular gap, maximum Fourier perturbation norm (l2 over modes k >= 1),
/// and maximum outer-boundary perimeter.
struct AdmissibilityLimits {
  double delta_gap = 0.1;
  double max_fourier_norm = 1.0;
  double max_perimeter = 100.0;
};

struct Violation {
  std::string kind;   // "gap" | "holdall" | "fourier_norm" | "perimeter"
  std::string detail;
};

/// Checks the spec against the limits on a fine angular grid (>= 720
/// samples). Returns the list of violations; empty means admissible.
std::vector<Violation> validate_admissible(const DomainSpec& spec,
                                           const AdmissibilityLimits& limits);

inline bool is_admissible(const DomainSpec& spec, const AdmissibilityLimits& limits) {
  return validate_admissible(spec, limits).empty();
}

enum class BoundaryTag { Gamma, Sigma };

/// Arc length of the selected boundary: 2*pi*a for Gamma, composite
/// quadrature of sqrt(rho^2 + rho'^2) for Sigma (refined until the value is
/// stable to 1e-10 relative).
double boundary_measure(const DomainSpec& spec, BoundaryTag which);

/// Conforming triangulation of the annulus on a structured polar grid.
/// Nodes are indexed j * n_theta + i with i the angular index (periodic)
/// and j = 0..n_r the radial layer; layer 0 lies on Gamma, layer n_r on
/// Sigma. Each quad is split along the same diagonal, so the connectivity
/// is a pure function of (n_r, n_theta).
struct Mesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> triangles; // positively oriented
  std::vector<std::array<int, 2>> gamma_edges;
  std::vector<std::array<int, 2>> sigma_edges;
  int n_r = 0;
  int n_theta = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double triangle_area(int t) const;
  double total_area() const;

  /// Sorted unique node indices on the tagged boundary.
  std::vector<int> boundary_nodes(BoundaryTag which) const;
};

/// Transfinite annular grid: node(i,j) at radius a + (j/n_r)(rho(theta_i) - a),
/// theta_i = 2*pi*i/n_theta. Throws on a degenerate spec (rho <= a at a grid
/// angle, or a non-positive triangle). Requires n_r >= 1, n_theta >= 8.
Mesh generate_mesh(const DomainSpec& spec, int n_r, int n_theta);

/// Structural mesh validation: positive areas, edge incidence counts
/// (boundary edges in exactly one triangle, interior edges in two), and
/// closed tagged boundary loops. Returns human-readable problems; empty
/// means valid.
std::vector<std::string> check_mesh(const Mesh& mesh);

/// max over sampled theta of |rho1(theta) - rho2(theta)|. Requires equal
/// inner radii.
double domain_distance(const DomainSpec& s1, const DomainSpec& s2);

/// Plain-text mesh export (format documented in the README).
std::string export_mesh(const Mesh& mesh);

} // namespace bfb
