#include "bfb/cost.hpp"

#include <cmath>
#include <string>

#include "bfb/error.hpp"

namespace bfb {

CostReport energy_gap(const Mesh& mesh, const Forms& forms, const StateSolution& neumann,
                      const StateSolution& robin) {
  const std::size_t n = static_cast<std::size_t>(mesh.node_count());
  if (neumann.u.size() != n || robin.u.size() != n) {
    throw Error("energy_gap: solution does not match the mesh");
  }
  FieldVector diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = neumann.u[i] - robin.u[i];
  }
  CostReport report;
  report.j = forms.stiffness.quadratic_form(diff);
  report.semi_neumann_sq = forms.stiffness.quadratic_form(neumann.u);
  report.semi_robin_sq = forms.stiffness.quadratic_form(robin.u);
  report.cross = forms.stiffness.bilinear_form(neumann.u, robin.u);
  report.resolution = {mesh.n_r, mesh.n_theta};
  report.params = robin.params;
  return report;
}

CostReport energy_gap(const Mesh& mesh, const StateSolution& neumann,
                      const StateSolution& robin) {
  return energy_gap(mesh, Forms::assemble(mesh), neumann, robin);
}

CostReport evaluate_cost(const DomainSpec& spec, const PhysicsParams& p,
                         MeshResolution resolution) {
  const Mesh mesh = generate_mesh(spec, resolution.n_r, resolution.n_theta);
  const Forms forms = Forms::assemble(mesh);
  const StateSolution neumann = solve_neumann(mesh, forms, p);
  const StateSolution robin = solve_robin(mesh, forms, p);
  return energy_gap(mesh, forms, neumann, robin);
}

std::vector<double> flatten_coefficients(const DomainSpec& spec) {
  std::vector<double> params;
  params.reserve(2 * spec.fourier.size());
  params.push_back(spec.fourier[0].cos_k);
  for (std::size_t k = 1; k < spec.fourier.size(); ++k) {
    params.push_back(spec.fourier[k].cos_k);
    params.push_back(spec.fourier[k].sin_k);
  }
  return params;
}

DomainSpec with_coefficients(const DomainSpec& spec, const std::vector<double>& params) {
  if (params.size() != 2 * spec.fourier.size() - 1) {
    throw Error("with_coefficients: parameter count does not match the mode count");
  }
  DomainSpec out = spec;
  out.fourier[0].cos_k = params[0];
  out.fourier[0].sin_k = 0.0;
  for (std::size_t k = 1; k < spec.fourier.size(); ++k) {
    out.fourier[k].cos_k = params[2 * k - 1];
    out.fourier[k].sin_k = params[2 * k];
  }
  return out;
}

std::vector<std::string> parameter_names(int max_k) {
  std::vector<std::string> names = {"cos_0"};
  for (int k = 1; k <= max_k; ++k) {
    names.push_back("cos_" + std::to_string(k));
    names.push_back("sin_" + std::to_string(k));
  }
  return names;
}

std::vector<double> shape_gradient_fd(const DomainSpec& spec, const PhysicsParams& p,
                                      const AdmissibilityLimits& limits,
                                      MeshResolution resolution, double fd_step) {
  const std::vector<double> base = flatten_coefficients(spec);
  const std::vector<std::string> names = parameter_names(static_cast<int>(spec.fourier.size()) - 1);

  std::vector<double> gradient(base.size(), 0.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::vector<double> plus = base;
    std::vector<double> minus = base;
    plus[i] += fd_step;
    minus[i] -= fd_step;
    const DomainSpec spec_plus = with_coefficients(spec, plus);
    const DomainSpec spec_minus = with_coefficients(spec, minus);
    if (!is_admissible(spec_plus, limits) || !is_admissible(spec_minus, limits)) {
      throw Error("shape_gradient_fd: perturbed domain inadmissible in coefficient " +
                  names[i]);
    }
    const double j_plus = evaluate_cost(spec_plus, p, resolution).j;
    const double j_minus = evaluate_cost(spec_minus, p, resolution).j;
    gradient[i] = (j_plus - j_minus) / (2.0 * fd_step);
  }
  return gradient;
}

} // namespace bfb
