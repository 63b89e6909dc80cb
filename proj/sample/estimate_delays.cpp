// SPDX-License-Identifier: Apache-2.0
// Minimal use of the library: three echoes, one noisy measurement, GLSR and OMP estimates.

#include "quadcs/experiments.hpp"

#include <cstdio>

using namespace quadcs;

int main() {
  const QuadCsSystem sys = make_system(SystemSpec{}, 7);
  const auto& cfg = sys.cfg();
  const BeamspaceModel model = assemble_model(sys);

  const TargetScene scene{{1.3e-6, 4.71e-6, 8.025e-6}, {cd(1.0, 0.0), cd(0.0, 0.8), cd(-0.6, 0.3)}};
  Rng rng(11);
  const ComplexVector s = measure(sys, add_noise(scene_spectrum(scene, sys.s0_table()), cfg.B, 25.0, rng));

  // Sector from a coarse prior: the OMP solution on the tau0 grid, widened by 2 tau0.
  const auto omp = run_omp(s, build_grid_dictionary(sys, cfg.tau0), 3);
  const auto glsr = run_glsr(s, sys, model, glsr_options_for(cfg, omp.delays, 2.0, 3));

  std::printf("%12s %12s %12s\n", "true [us]", "OMP [us]", "GLSR [us]");
  for (std::size_t k = 0; k < 3; ++k)
    std::printf("%12.5f %12.5f %12.5f\n", scene.delays[k] * 1e6, omp.delays[k] * 1e6, glsr.delays[k] * 1e6);
  return 0;
}
