#include "bfb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "bfb/error.hpp"

namespace bfb {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kValidationSamples = 1024; // >= 720 angles
} // namespace

double DomainSpec::outer_radius(double theta) const {
  double r = 0.0;
  for (std::size_t k = 0; k < fourier.size(); ++k) {
    const double kk = static_cast<double>(k);
    r += fourier[k].cos_k * std::cos(kk * theta) + fourier[k].sin_k * std::sin(kk * theta);
  }
  return r;
}

double DomainSpec::outer_radius_deriv(double theta) const {
  double d = 0.0;
  for (std::size_t k = 1; k < fourier.size(); ++k) {
    const double kk = static_cast<double>(k);
    d += kk * (-fourier[k].cos_k * std::sin(kk * theta) + fourier[k].sin_k * std::cos(kk * theta));
  }
  return d;
}

double DomainSpec::holdall_area() const {
  return std::numbers::pi * holdall_radius * holdall_radius;
}

DomainSpec build_domain(double inner_radius, std::vector<FourierCoeff> fourier,
                        double holdall_radius) {
  if (!(inner_radius > 0.0)) {
    throw Error("build_domain: inner radius must be positive");
  }
  if (!(holdall_radius > inner_radius)) {
    throw Error("build_domain: hold-all radius must exceed the inner radius");
  }
  if (fourier.empty()) {
    throw Error("build_domain: at least the k=0 coefficient is required");
  }
  for (const auto& c : fourier) {
    if (!std::isfinite(c.cos_k) || !std::isfinite(c.sin_k)) {
      throw Error("build_domain: non-finite Fourier coefficient");
    }
  }
  DomainSpec spec;
  spec.inner_radius = inner_radius;
  spec.fourier = std::move(fourier);
  spec.holdall_radius = holdall_radius;
  return spec;
}

std::vector<Violation> validate_admissible(const DomainSpec& spec,
                                           const AdmissibilityLimits& limits) {
  std::vector<Violation> violations;

  double min_rho = std::numeric_limits<double>::infinity();
  double max_rho = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kValidationSamples; ++i) {
    const double rho = spec.outer_radius(kTwoPi * i / kValidationSamples);
    min_rho = std::min(min_rho, rho);
    max_rho = std::max(max_rho, rho);
  }

  char buf[160];
  if (min_rho - spec.inner_radius < limits.delta_gap) {
    std::snprintf(buf, sizeof buf, "min rho = %.6g, requires a + delta_gap = %.6g",
                  min_rho, spec.inner_radius + limits.delta_gap);
    violations.push_back({"gap", buf});
  }
  if (max_rho > spec.holdall_radius - limits.delta_gap) {
    std::snprintf(buf, sizeof buf, "max rho = %.6g, requires R_U - delta_gap = %.6g",
                  max_rho, spec.holdall_radius - limits.delta_gap);
    violations.push_back({"holdall", buf});
  }

  double norm_sq = 0.0;
  for (std::size_t k = 1; k < spec.fourier.size(); ++k) {
    norm_sq += spec.fourier[k].cos_k * spec.fourier[k].cos_k +
               spec.fourier[k].sin_k * spec.fourier[k].sin_k;
  }
  if (std::sqrt(norm_sq) > limits.max_fourier_norm) {
    std::snprintf(buf, sizeof buf, "perturbation norm = %.6g, cap = %.6g",
                  std::sqrt(norm_sq), limits.max_fourier_norm);
    violations.push_back({"fourier_norm", buf});
  }

  if (min_rho > 0.0) { // perimeter is meaningless for a self-crossing graph
    const double perimeter = boundary_measure(spec, BoundaryTag::Sigma);
    if (perimeter > limits.max_perimeter) {
      std::snprintf(buf, sizeof buf, "perimeter = %.6g, cap = %.6g",
                    perimeter, limits.max_perimeter);
      violations.push_back({"perimeter", buf});
    }
  }
  return violations;
}

double boundary_measure(const DomainSpec& spec, BoundaryTag which) {
  if (which == BoundaryTag::Gamma) {
    return kTwoPi * spec.inner_radius;
  }
  // Composite midpoint rule on the periodic integrand, doubled until stable.
  // Convergence is spectral for smooth rho, so this reaches 1e-10 relative
  // in a few rounds.
  auto integrate = [&spec](int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta = kTwoPi * (i + 0.5) / n;
      const double rho = spec.outer_radius(theta);
      const double drho = spec.outer_radius_deriv(theta);
      sum += std::sqrt(rho * rho + drho * drho);
    }
    return sum * kTwoPi / n;
  };
  int n = 1024;
  double value = integrate(n);
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    const double refined = integrate(n);
    if (std::abs(refined - value) <= 1e-10 * std::abs(refined)) {
      return refined;
    }
    value = refined;
  }
  return value;
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const auto& p0 = nodes[tri[0]];
  const auto& p1 = nodes[tri[1]];
  const auto& p2 = nodes[tri[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    area += triangle_area(t);
  }
  return area;
}

std::vector<int> Mesh::boundary_nodes(BoundaryTag which) const {
  const auto& edges = which == BoundaryTag::Gamma ? gamma_edges : sigma_edges;
  std::set<int> ids;
  for (const auto& e : edges) {
    ids.insert(e[0]);
    ids.insert(e[1]);
  }
  return {ids.begin(), ids.end()};
}

Mesh generate_mesh(const DomainSpec& spec, int n_r, int n_theta) {
  if (n_r < 1 || n_theta < 8) {
    throw Error("generate_mesh: need n_r >= 1 and n_theta >= 8");
  }
  const double a = spec.inner_radius;

  std::vector<double> rho(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    rho[i] = spec.outer_radius(kTwoPi * i / n_theta);
    if (!(rho[i] > a)) {
      throw Error("generate_mesh: degenerate domain, rho(theta) <= a at a grid angle");
    }
  }

  Mesh mesh;
  mesh.n_r = n_r;
  mesh.n_theta = n_theta;
  mesh.nodes.reserve(static_cast<std::size_t>(n_theta) * (n_r + 1));
  for (int j = 0; j <= n_r; ++j) {
    const double t = static_cast<double>(j) / n_r;
    for (int i = 0; i < n_theta; ++i) {
      const double theta = kTwoPi * i / n_theta;
      const double r = a + t * (rho[i] - a);
      mesh.nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }

  auto node_id = [n_theta](int i, int j) { return j * n_theta + (i % n_theta); };

  // Quad (i,j) in positive orientation is (v00, v01, v11, v10): outward in
  // radius first, then counterclockwise in angle. Every quad is split along
  // the v00-v11 diagonal.
  mesh.triangles.reserve(static_cast<std::size_t>(2) * n_r * n_theta);
  for (int j = 0; j < n_r; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      const int v00 = node_id(i, j);
      const int v10 = node_id(i + 1, j);
      const int v11 = node_id(i + 1, j + 1);
      const int v01 = node_id(i, j + 1);
      mesh.triangles.push_back({v00, v01, v11});
      mesh.triangles.push_back({v00, v11, v10});
    }
  }

  for (int i = 0; i < n_theta; ++i) {
    mesh.gamma_edges.push_back({node_id(i, 0), node_id(i + 1, 0)});
    mesh.sigma_edges.push_back({node_id(i, n_r), node_id(i + 1, n_r)});
  }

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) {
      throw Error("generate_mesh: non-positive triangle area (degenerate spec)");
    }
  }
  return mesh;
}

std::vector<std::string> check_mesh(const Mesh& mesh) {
  std::vector<std::string> problems;
  char buf[160];

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) {
      std::snprintf(buf, sizeof buf, "triangle %d has non-positive area", t);
      problems.emplace_back(buf);
    }
  }

  // Count how many triangles share each undirected edge.
  std::map<std::pair<int, int>, int> edge_count;
  auto key = [](int u, int v) { return std::make_pair(std::min(u, v), std::max(u, v)); };
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      ++edge_count[key(tri[e], tri[(e + 1) % 3])];
    }
  }
  std::set<std::pair<int, int>> tagged;
  for (const auto& e : mesh.gamma_edges) tagged.insert(key(e[0], e[1]));
  for (const auto& e : mesh.sigma_edges) tagged.insert(key(e[0], e[1]));

  for (const auto& [edge, count] : edge_count) {
    const bool boundary = count == 1;
    if (count > 2) {
      std::snprintf(buf, sizeof buf, "edge (%d,%d) shared by %d triangles", edge.first,
                    edge.second, count);
      problems.emplace_back(buf);
    }
    if (boundary && !tagged.count(edge)) {
      std::snprintf(buf, sizeof buf, "boundary edge (%d,%d) is untagged", edge.first,
                    edge.second);
      problems.emplace_back(buf);
    }
    if (!boundary && tagged.count(edge)) {
      std::snprintf(buf, sizeof buf, "interior edge (%d,%d) is tagged", edge.first,
                    edge.second);
      problems.emplace_back(buf);
    }
  }

  // Each tagged loop must be closed: every tagged node has exactly two
  // incident tagged edges.
  for (const auto* edges : {&mesh.gamma_edges, &mesh.sigma_edges}) {
    std::map<int, int> incidence;
    for (const auto& e : *edges) {
      ++incidence[e[0]];
      ++incidence[e[1]];
    }
    for (const auto& [node, count] : incidence) {
      if (count != 2) {
        std::snprintf(buf, sizeof buf, "tagged node %d has %d incident tagged edges",
                      node, count);
        problems.emplace_back(buf);
      }
    }
  }
  return problems;
}

double domain_distance(const DomainSpec& s1, const DomainSpec& s2) {
  if (s1.inner_radius != s2.inner_radius) {
    throw Error("domain_distance: specs must share the inner radius");
  }
  double dist = 0.0;
  for (int i = 0; i < kValidationSamples; ++i) {
    const double theta = kTwoPi * i / kValidationSamples;
    dist = std::max(dist, std::abs(s1.outer_radius(theta) - s2.outer_radius(theta)));
  }
  return dist;
}

std::string export_mesh(const Mesh& mesh) {
  std::ostringstream out;
  char buf[80];
  out << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << "\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  out << "gamma_edges " << mesh.gamma_edges.size() << "\n";
  for (const auto& e : mesh.gamma_edges) {
    out << e[0] << " " << e[1] << "\n";
  }
  out << "sigma_edges " << mesh.sigma_edges.size() << "\n";
  for (const auto& e : mesh.sigma_edges) {
    out << e[0] << " " << e[1] << "\n";
  }
  return out.str();
}

} // namespace bfb
