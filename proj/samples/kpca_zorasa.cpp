// Zo-RASA on a small k-PCA instance over St(10, 3).

#include "zorasa/bench/problems.hpp"
#include "zorasa/rasa.hpp"

#include <cstdio>

int main() {
  using namespace zorasa;
  RandomStream rng(42);
  const auto problem = bench::make_kpca_problem(10, 3, rng);
  const auto oracle = bench::make_kpca_oracle(problem);
  const Stiefel st(10, 3);
  const ManifoldPoint x0 = st.random_point(rng);
  const Index d = st.descriptor().intrinsic_dim;

  RasaConfig cfg;
  cfg.N = 20000;
  cfg.beta = 100.0;
  cfg.tau_mode = TauMode::SingleSample;
  cfg.tau_scale = 1.0;
  cfg.retraction = RetractionKind::Polar;
  cfg.mu = mu_schedule(problem.lambda_max(), d, cfg.N, 1.0);
  cfg.record_every = 2000;

  RunProbes probes;
  probes.problem_metric = [&](const ManifoldPoint& x) { return bench::kpca_subspace_error(problem, x.value); };
  const RunResult res = run(cfg, oracle, st, x0, rng, probes);

  std::printf("%8s %12s %12s %12s %12s\n", "iter", "calls", "f - f*", "||grad f||", "||Theta||_F");
  for (const auto& r : res.trajectory) {
    std::printf("%8lld %12lld %12.4e %12.4e %12.4e\n", static_cast<long long>(r.iter),
                static_cast<long long>(r.oracle_calls), r.f_gap, r.grad_norm, r.problem_metric);
  }
  if (res.failure) std::printf("stopped: %s\n", res.failure->c_str());
  return res.failure ? 1 : 0;
}
