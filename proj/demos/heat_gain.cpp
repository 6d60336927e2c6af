// Heat rod with a unit Dirichlet input at one end: the state norm settles at
// the ISS gain 1/sqrt(3) while the Lyapunov form V = <(-A)^{-1}x, x> stays
// below |P| |x|^2.

#include <cmath>
#include <cstdio>
#include <vector>

#include "isslab/lyapunov.hpp"
#include "isslab/system.hpp"

int main() {
  const auto sys = isslab::heat_dirichlet({1.0, 128});
  const auto op = isslab::build_neg_inverse(sys);
  const isslab::State x0(sys.n_modes(), 0.0);
  const auto u = isslab::InputSignal::constant(1.0, 10.0);
  const std::vector<double> grid{0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0};
  const auto traj = isslab::sample_trajectory(sys, x0, u, grid);

  std::printf("%8s %12s %12s\n", "t", "|x(t)|", "V(x(t))");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::printf("%8.3f %12.6f %12.6f\n", grid[i], isslab::state_norm(traj.states[i]), isslab::v_value(op, traj.states[i]));
  }
  std::printf("1/sqrt(3) = %.6f, |P| = %.6f\n", 1.0 / std::sqrt(3.0), op.norm());
}
