// Serial vs OpenMP best_augmentation on one wide-support presentation.
// Usage: bench_augment [repetitions] [threads]

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>

#include "hugenfold/augment.hpp"
#include "hugenfold/presentation.hpp"

using namespace hugenfold;
using Clock = std::chrono::steady_clock;

namespace {

// Four types over A1 = [1 1 1], A2 = [1 -1 0], boxes [0,8]. Every type
// starts with 36 distinct bricks (a,a,c), a,c < 6, each a million times.
struct Workload {
  HugeNFoldInstance inst;
  CompactPresentation cp;
};

Workload make_workload() {
  const IntMatrix a1 = IntMatrix::from_rows({{1, 1, 1}});
  const IntMatrix a2 = IntMatrix::from_rows({{1, -1, 0}});
  const std::vector<std::vector<long long>> costs{{3, -1, 2}, {-2, 1, 1}, {1, 1, -3}, {0, -2, 1}};
  std::vector<BrickType> types;
  CompactPresentation cp;
  for (const auto& w : costs) {
    BrickType ty;
    for (long long c : w) {
      ty.w.emplace_back(c);
      ty.lower.emplace_back(Int(0));
      ty.upper.emplace_back(Int(8));
    }
    ty.b = zeros(1);
    BrickMap m;
    for (long long a = 0; a < 6; ++a)
      for (long long c = 0; c < 6; ++c) m[to_intvec({a, a, c})] = Int(1'000'000);
    ty.count = type_count(m);
    types.push_back(std::move(ty));
    cp.types.push_back(std::move(m));
  }
  IntVec b0 = matvec(a1, aggregate(cp, 3).total);
  return {HugeNFoldInstance(Bimatrix(a1, a2), std::move(types), std::move(b0)), std::move(cp)};
}

double time_it(int reps, const std::function<std::optional<AugmentStep>()>& f, std::optional<AugmentStep>& out) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    out = f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  const int threads = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

  const Workload wl = make_workload();
  const auto t0 = Clock::now();
  const GraverTemplates templ = instance_templates(wl.inst);
  const double prep = std::chrono::duration<double>(Clock::now() - t0).count();

  AugmentOptions serial, parallel;
  serial.phi_budget = parallel.phi_budget = 1'000'000'000;
  parallel.threads = threads;
  std::optional<AugmentStep> s, p;
  const double ts = time_it(reps, [&] { return best_augmentation_serial(wl.inst, wl.cp, templ, serial); }, s);
  const double tp = time_it(reps, [&] { return best_augmentation_parallel(wl.inst, wl.cp, templ, parallel); }, p);

  const bool same = s.has_value() == p.has_value() && (!s || (s->template_index == p->template_index &&
                                                              s->phi == p->phi && s->alpha == p->alpha));
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "templates " << templ.templates.size() << " (g=" << templ.complexity << ", " << prep << " s)\n";
  std::cout << "serial   " << ts << " s\n";
  std::cout << "parallel " << tp << " s with " << threads << " threads (hardware " << omp_get_num_procs() << ")\n";
  std::cout << "speedup  " << (tp > 0 ? ts / tp : 0.0) << "\n";
  std::cout << "same step " << (same ? "yes" : "NO") << "\n";
  return same ? 0 : 1;
}
