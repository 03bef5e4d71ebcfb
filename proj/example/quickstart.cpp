// Cool the 65 MHz sample, synthesize what the analyzer would show, and
// read the temperature back off the spectrum.

#include <cstdio>

#include <optomech/optomech.hpp>

int main() {
  using namespace optomech;

  const Scene scene = *preset("sample65");
  const CoolingScene cs = scene.cooling_scene();

  for (double p : {0.0, 0.05e-3, 0.1e-3, 0.2e-3}) {
    const auto pt = cooling_point(cs, p);
    std::printf("P = %5.3f mW  Gamma_eff/2pi = %7.1f kHz  n_f = %6.1f  T_mode = %.3f K\n", p * 1e3,
                rad_to_hz(pt.gamma_eff) * 1e-3, pt.n_f, pt.t_mode);
  }

  const auto op = cooling_point(cs, scene.drive.power_in_w);
  const auto th = thermometry_round_trip(scene, op.t_mode, op.gamma_eff, 42);
  std::printf("noise thermometry: %.3f K (model %.3f K), <n> = %.1f\n", th.temperature, op.t_mode, th.occupancy);

  const auto best = optimize_operating_point(cs, {1e-3, -2.0 * cs.mode.omega_m(), 0.0});
  std::printf("best point below 1 mW: P = %.3f mW, Delta/2pi = %.2f MHz, n_f = %.1f\n", best.power_in * 1e3,
              rad_to_hz(best.detuning) * 1e-6, best.n_f);
}
