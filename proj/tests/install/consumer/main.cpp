#include <cmath>
#include <cstdio>

#include "damplab/config.hpp"
#include "damplab/stationary.hpp"

int main() {
  using namespace damplab;
  const auto c = default_config(ExperimentKind::ResolventSweep);
  const CircleGrid grid(c.nodes_for(8.0), c.scheme);
  const ResolventPoint p = resolvent_norm_1d(8.0, 64.0, c.profile(), grid, {});
  std::printf("norm %.6g\n", p.norm);
  return std::isfinite(p.norm) && p.norm > 0.0 ? 0 : 1;
}
