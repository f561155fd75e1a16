#include "bfb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bfb/error.hpp"

namespace bfb {

void OptimConfig::validate() const {
  if (!(initial_step > 0.0) || !(shrink > 0.0) || !(shrink < 1.0) || !(min_step > 0.0)) {
    throw Error("optimizer: step parameters must be positive (shrink in (0,1))");
  }
  if (!(j_tol > 0.0) || !(grad_tol > 0.0)) {
    throw Error("optimizer: tolerances must be positive");
  }
  if (max_iters < 1) {
    throw Error("optimizer: max_iters must be >= 1");
  }
  if (!(fd_step > 0.0)) {
    throw Error("optimizer: fd_step must be positive");
  }
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

OptimTrajectory run_gradient_descent(const DomainSpec& initial, const PhysicsParams& p,
                                     const AdmissibilityLimits& limits,
                                     const OptimConfig& cfg) {
  OptimTrajectory traj;
  traj.status = OptimStatus::MaxIters;
  std::vector<double> x = flatten_coefficients(initial);
  double j = evaluate_cost(initial, p, cfg.resolution).j;

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    if (j <= cfg.j_tol) {
      traj.records.push_back({iter, x, j, 0.0, true});
      traj.status = OptimStatus::JTolReached;
      break;
    }
    const std::vector<double> grad =
        shape_gradient_fd(with_coefficients(initial, x), p, limits, cfg.resolution,
                          cfg.fd_step);
    const double grad_norm = norm2(grad);
    traj.records.push_back({iter, x, j, grad_norm, true});
    if (grad_norm <= cfg.grad_tol) {
      traj.status = OptimStatus::GradTolReached;
      break;
    }
    if (iter == cfg.max_iters) {
      traj.status = OptimStatus::MaxIters;
      break;
    }

    // Backtracking: shrink on inadmissible endpoints and on insufficient
    // decrease alike.
    double step = cfg.initial_step;
    bool accepted = false;
    while (step >= cfg.min_step) {
      std::vector<double> candidate = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        candidate[i] -= step * grad[i];
      }
      const DomainSpec candidate_spec = with_coefficients(initial, candidate);
      if (is_admissible(candidate_spec, limits)) {
        const double j_new = evaluate_cost(candidate_spec, p, cfg.resolution).j;
        if (j_new <= j - cfg.armijo * step * grad_norm * grad_norm) {
          x = candidate;
          j = j_new;
          accepted = true;
          break;
        }
      }
      step *= cfg.shrink;
    }
    if (!accepted) {
      traj.status = OptimStatus::Stalled;
      break;
    }
  }

  traj.final_spec = with_coefficients(initial, x);
  traj.final_j = j;
  return traj;
}

OptimTrajectory run_nelder_mead(const DomainSpec& initial, const PhysicsParams& p,
                                const AdmissibilityLimits& limits, const OptimConfig& cfg) {
  const std::size_t dim = flatten_coefficients(initial).size();

  auto cost = [&](const std::vector<double>& params) {
    const DomainSpec spec = with_coefficients(initial, params);
    if (!is_admissible(spec, limits)) {
      return std::numeric_limits<double>::infinity();
    }
    return evaluate_cost(spec, p, cfg.resolution).j;
  };

  // Initial simplex: start point plus one vertex per coordinate.
  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  simplex.push_back(flatten_coefficients(initial));
  values.push_back(cost(simplex[0]));
  const double edge = 0.2 * cfg.initial_step;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> v = simplex[0];
    v[i] += edge;
    if (!std::isfinite(cost(v))) {
      v[i] -= 2.0 * edge;
    }
    simplex.push_back(v);
    values.push_back(cost(v));
  }

  OptimTrajectory traj;
  auto order = [&] {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (std::size_t k : idx) {
      s2.push_back(simplex[k]);
      v2.push_back(values[k]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  traj.status = OptimStatus::MaxIters;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    order();
    const double spread = values[dim] - values[0];
    traj.records.push_back({iter, simplex[0], values[0], spread, true});
    if (values[0] <= cfg.j_tol) {
      traj.status = OptimStatus::JTolReached;
      break;
    }
    if (std::isfinite(spread) && spread <= cfg.grad_tol * std::max(1.0, values[0])) {
      traj.status = OptimStatus::GradTolReached;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) {
        centroid[i] += simplex[v][i] / static_cast<double>(dim);
      }
    }
    auto blend = [&](double t) {
      std::vector<double> out(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        out[i] = centroid[i] + t * (simplex[dim][i] - centroid[i]);
      }
      return out;
    };

    const std::vector<double> reflected = blend(-1.0);
    const double fr = cost(reflected);
    if (fr < values[0]) {
      const std::vector<double> expanded = blend(-2.0);
      const double fe = cost(expanded);
      if (fe < fr) {
        simplex[dim] = expanded;
        values[dim] = fe;
      } else {
        simplex[dim] = reflected;
        values[dim] = fr;
      }
    } else if (fr < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = fr;
    } else {
      const std::vector<double> contracted = blend(fr < values[dim] ? -0.5 : 0.5);
      const double fc = cost(contracted);
      if (fc < std::min(fr, values[dim])) {
        simplex[dim] = contracted;
        values[dim] = fc;
      } else {
        for (std::size_t v = 1; v <= dim; ++v) {
          for (std::size_t i = 0; i < dim; ++i) {
            simplex[v][i] = simplex[0][i] + 0.5 * (simplex[v][i] - simplex[0][i]);
          }
          values[v] = cost(simplex[v]);
        }
      }
    }
  }

  order();
  traj.final_spec = with_coefficients(initial, simplex[0]);
  traj.final_j = values[0];
  return traj;
}

} // namespace

std::string to_string(OptimStatus status) {
  switch (status) {
    case OptimStatus::JTolReached: return "j_tol_reached";
    case OptimStatus::GradTolReached: return "grad_tol_reached";
    case OptimStatus::MaxIters: return "max_iters";
    case OptimStatus::Stalled: return "stalled";
  }
  return "unknown";
}

OptimTrajectory optimize_shape(const DomainSpec& initial, const PhysicsParams& p,
                               const AdmissibilityLimits& limits, const OptimConfig& cfg) {
  cfg.validate();
  p.validate();
  if (!is_admissible(initial, limits)) {
    throw Error("optimize_shape: initial domain is not admissible");
  }
  if (cfg.method == OptimMethod::NelderMead) {
    return run_nelder_mead(initial, p, limits, cfg);
  }
  return run_gradient_descent(initial, p, limits, cfg);
}

} // namespace bfb
