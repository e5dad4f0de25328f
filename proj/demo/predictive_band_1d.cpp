// One-dimensional illustration: 40 binary observations of a known
// probability curve, then the predictive mean and a 95% band on a fine grid.
//
//   ./predictive_band_1d > band.csv
//
// Columns: x, true_p, mean, lower, median, upper.

#include <cstdio>

#include "binarygp/binarygp.hpp"

int main() {
  using namespace binarygp;
  const SimulatedPanel data = gen_demo_1d(40, 11);

  KernelSpec kernel;
  kernel.lengthscales = VectorXd::Ones(1);
  const FittedModel model = fit(data.inputs, data.panel, ModelOrder{0, 0}, kernel);
  std::fprintf(stderr, "alpha_0 %.3f alpha_1 %.3f sigma2 %.3f theta %.4f\n",
               model.coefficients.values[0], model.coefficients.values[1], model.cov.sigma2,
               model.cov.theta[0]);

  // Single-site updates move slowly when neighbouring sites are strongly
  // correlated, so the chain is thinned heavily.
  MHConfig mh;
  mh.seed = 11;
  mh.burn_in = 5000;
  mh.thin = 200;
  const PredictionCache cache(model);
  const MHSamples samples = mh_sample_probs(cache, mh);
  std::fprintf(stderr, "acceptance %.3f max split R-hat %.3f\n", samples.diagnostics.acceptance_rate,
               samples.diagnostics.max_split_rhat);

  std::printf("x,true_p,mean,lower,median,upper\n");
  for (int k = 0; k <= 100; ++k) {
    VectorXd x(1);
    x[0] = k / 100.0;
    const auto s = predict_at(cache, samples, x, {}, mh, {0.025, 0.5, 0.975});
    std::printf("%.2f,%.6f,%.6f,%.6f,%.6f,%.6f\n", x[0], demo_curve(x[0]), s.mean,
                s.quantiles[0].second, s.quantiles[1].second, s.quantiles[2].second);
  }
  return 0;
}
