#ifndef BINARYGP_OPTIMIZE_HPP
#define BINARYGP_OPTIMIZE_HPP

// Box-constrained derivative-free minimization on top of GSL's nmsimplex2.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "binarygp/common.hpp"

namespace binarygp {

struct BoxBounds {
  VectorXd lower;
  VectorXd upper;

  VectorXd project(const VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

struct SimplexOptions {
  double initial_step = 0.5;
  double size_tol = 1e-5;
  int max_iterations = 400;
  // Objective values at or above this are treated as infeasible.
  double infeasible_value = 1e100;
};

struct SimplexResult {
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  // Best objective value after each accepted iteration.
  std::vector<double> best_trace;
};

namespace optimize_detail {

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

using GslVector = std::unique_ptr<gsl_vector, VectorDeleter>;

inline GslVector to_gsl(const VectorXd& x) {
  GslVector v(gsl_vector_alloc(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) gsl_vector_set(v.get(), i, x[i]);
  return v;
}

inline VectorXd from_gsl(const gsl_vector* v) {
  VectorXd x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  return x;
}

struct Context {
  const std::function<double(const VectorXd&)>* objective;
  const BoxBounds* bounds;
  double infeasible_value;
};

inline double trampoline(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const Context*>(params);
  const VectorXd x = from_gsl(v);
  const VectorXd inside = ctx->bounds->project(x);
  double value = (*ctx->objective)(inside);
  if (!std::isfinite(value) || value > ctx->infeasible_value) value = ctx->infeasible_value;
  // Quadratic wall outside the box keeps the simplex near the feasible set.
  return value + 1e3 * (x - inside).squaredNorm();
}

}  // namespace optimize_detail

/// Minimizes `objective` over the box starting from x0. The objective is only
/// ever evaluated at points inside the box.
inline SimplexResult minimize_in_box(const std::function<double(const VectorXd&)>& objective,
                                     const VectorXd& x0, const BoxBounds& bounds,
                                     const SimplexOptions& options = {}) {
  using namespace optimize_detail;
  gsl_set_error_handler_off();
  Context ctx{&objective, &bounds, options.infeasible_value};
  gsl_multimin_function fn;
  fn.n = static_cast<std::size_t>(x0.size());
  fn.f = &trampoline;
  fn.params = &ctx;

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, fn.n));
  GslVector start = to_gsl(bounds.project(x0));
  GslVector steps = to_gsl(VectorXd::Constant(x0.size(), options.initial_step));
  SimplexResult result;
  if (gsl_multimin_fminimizer_set(solver.get(), &fn, start.get(), steps.get()) != GSL_SUCCESS) {
    result.x = bounds.project(x0);
    result.value = objective(result.x);
    return result;
  }
  result.best_trace.push_back(solver->fval);
  for (int it = 0; it < options.max_iterations; ++it) {
    ++result.iterations;
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    result.best_trace.push_back(solver->fval);
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, options.size_tol) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }
  // Report the objective at the projected point, without the wall penalty.
  result.x = bounds.project(from_gsl(solver->x));
  result.value = objective(result.x);
  if (!std::isfinite(result.value)) result.value = std::numeric_limits<double>::infinity();
  return result;
}

}  // namespace binarygp

#endif  // BINARYGP_OPTIMIZE_HPP
