// End-to-end workflow on a small simulated panel: simulate, fit, print the
// Wald table, then emulate the series of a few unseen sites.

#include <cstdio>

#include "binarygp/binarygp.hpp"

int main() {
  using namespace binarygp;
  TruthSpec truth = default_gp_truth(5);
  const SimulatedPanel all = gen_gp_panel(truth, 90, 12);
  const SimulatedPanel train = all.slice(0, 80);
  const SimulatedPanel test = all.slice(80, 10);

  KernelSpec kernel;
  kernel.lengthscales = VectorXd::Ones(5);
  const FittedModel model = fit(train.inputs, train.panel, truth.order, kernel);
  std::printf("converged: %s after %d outer iterations\n",
              model.report.converged ? "yes" : "no", model.report.outer_iterations);
  std::printf("sigma2 %.3f\n\n", model.cov.sigma2);

  std::printf("%-10s %9s %9s %9s %9s\n", "", "Value", "Std.dev", "Z", "p");
  for (const auto& row : coef_report(model).rows) {
    std::printf("%-10s %9.4f %9.4f %9.3f %9.4f\n", row.name.c_str(), row.estimate, row.std_dev,
                row.z_score, row.p_value);
  }

  MHConfig mh;
  mh.seed = 3;
  const PredictionCache cache(model);
  const MHSamples samples = mh_sample_probs(cache, mh);
  const MatrixXd pred = predict_gp(cache, samples, test.inputs.sites, test.panel.T(), mh);
  std::printf("\nMH acceptance %.3f, held-out RMSPE %.4f\n", samples.diagnostics.acceptance_rate,
              rmspe(test.true_p, pred));
  return 0;
}
