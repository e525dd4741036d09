// Serial reference kernels against their OpenMP counterparts.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>

#include "zermelo/connector.hpp"
#include "zermelo/detail/parallel.hpp"
#include "zermelo/finsler.hpp"
#include "zermelo/geodesic.hpp"
#include "zermelo/search.hpp"

using namespace zermelo;

namespace {

double best_of(int reps, const std::function<void()> &fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char *name, const std::function<void()> &serial, const std::function<void()> &parallel,
         int reps = 3) {
  const double s = best_of(reps, serial), p = best_of(reps, parallel);
  std::printf("%-22s %10.4f %10.4f %8.2fx\n", name, s, p, s / p);
}

}  // namespace

int main() {
  const WindField shear = WindField::shear();
  std::printf("threads: %d\n", detail::max_threads());
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

  FanSpec spec;
  spec.start = {0, -0.5};
  spec.d_phi = std::numbers::pi / 90;
  spec.t_max = 10;
  row("fan (180 paths)", [&] { fan_serial(shear, spec); }, [&] { fan(shear, spec); });

  row("curvature profile", [&] { curvature_profile_serial(shear, {0, -0.5}, 36000); },
      [&] { curvature_profile(shear, {0, -0.5}, 36000); });

  PatternParams pp;
  pp.spacing = 0.1;
  pp.legs = 10;
  const SearchPattern es = generate_pattern(pp);
  const SearchPlan plan = plan_optimal(shear, es);
  const SearchDomain dom = nominal_domain(es);
  row("coverage (400x400)", [&] { coverage_check_serial(plan, dom, 0.05, 400); },
      [&] { coverage_check(plan, dom, 0.05, 400); });

  row("connect (72 seeds)", [&] { connect_serial(shear, {0, -0.5}, {-1, -0.5}); },
      [&] { connect(shear, {0, -0.5}, {-1, -0.5}); });

  PlanOptions serial;
  serial.parallel = false;
  row("plan_optimal", [&] { plan_optimal(shear, es, serial); }, [&] { plan_optimal(shear, es); }, 1);
  return 0;
}
