// Projection-based vector transport against parallel transport on Gr(10, 5).

#include "zorasa/zorasa.hpp"

#include <cstdio>

int main() {
  using namespace zorasa;
  RandomStream rng(3);
  const Grassmann gr(10, 5);
  const ManifoldPoint X = gr.random_point(rng);
  const TangentVector v = gr.sample_tangent_gaussian(X, rng);

  std::printf("%10s %14s %14s %10s\n", "||G||", "dist", "gap", "gap/dist");
  for (double s : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    TangentVector G = gr.sample_tangent_gaussian(X, rng);
    G.value *= s / gr.norm(X, G);
    const ManifoldPoint Y = gr.exp_map(X, G);
    const TangentVector pt = gr.transport_along(X, G, v);
    const TangentVector vt = gr.project_tangent(Y, v.value);
    const double dist = gr.distance(X, Y);
    const double gap = (pt.value - vt.value).norm();
    std::printf("%10.3g %14.6e %14.6e %10.4f\n", s, dist, gap, gap / dist);
  }
  return 0;
}
