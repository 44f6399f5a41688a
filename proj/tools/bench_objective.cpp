// Times the parallel objective kernels against the serial reference on
// synthetic populations and prints the speedup. Usage:
//   bench_objective [n_points] [k] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msgd/data.hpp"
#include "msgd/objective.hpp"
#include "msgd/reference.hpp"

using namespace msgd;

namespace {

double time_best_of(int reps, const auto& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

void bench_case(const char* name, const ModelBank& bank, const Population& pop,
                const LossModel& loss, double zeta, int reps) {
  double f_par = 0.0, f_ser = 0.0;
  const double t_eval_par = time_best_of(reps, [&] { f_par = evaluate(bank, pop, loss, zeta).f; });
  const double t_eval_ser =
      time_best_of(reps, [&] { f_ser = reference::evaluate(bank, pop, loss, zeta).f; });
  const double t_grad_par = time_best_of(reps, [&] { gradient_f(bank, pop, loss, zeta); });
  const double t_grad_ser = time_best_of(reps, [&] { reference::gradient_f(bank, pop, loss, zeta); });

  if (std::fabs(f_par - f_ser) > 1e-9 * std::max(1.0, std::fabs(f_ser)))
    std::printf("!! %s: parallel/serial mismatch (%.17g vs %.17g)\n", name, f_par, f_ser);

  std::printf("%-24s evaluate %9.3f ms | serial %9.3f ms | speedup %5.2fx\n", name,
              1e3 * t_eval_par, 1e3 * t_eval_ser, t_eval_ser / t_eval_par);
  std::printf("%-24s gradient %9.3f ms | serial %9.3f ms | speedup %5.2fx\n", "",
              1e3 * t_grad_par, 1e3 * t_grad_ser, t_grad_ser / t_grad_par);
}

}  // namespace

int main(int argc, char** argv) {
  const long n = argc > 1 ? std::atol(argv[1]) : 400000;
  const int k = argc > 2 ? std::atoi(argv[2]) : 4;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

#ifdef _OPENMP
  std::printf("openmp threads: %d, n = %ld, k = %d\n", omp_get_max_threads(), n, k);
#else
  std::printf("built without openmp, n = %ld, k = %d\n", n, k);
#endif

  RandomSource rng(42);

  {
    const Population pop = make_uniform_grid_population(n);
    const LossModel loss = make_squared_scalar();
    ModelBank bank = make_bank(k, loss.shape);
    for (Vec& theta : bank.params) theta[0] = rng.uniform01();
    bench_case("scalar-squared", bank, pop, loss, 0.3, reps);
  }

  {
    const int d = 16;
    DatasetSpec spec;
    spec.source = DataSource::GaussianMixture;
    spec.n = n;
    spec.seed = 7;
    spec.split_fraction = 0.5;
    spec.mixture.label_rule = LabelRule::LocalHyperplane;
    for (int c = 0; c < 4; ++c) {
      Vec mean(d, 0.0);
      mean[static_cast<std::size_t>(c) % d] = 3.0 * (c % 2 ? 1.0 : -1.0);
      mean[(static_cast<std::size_t>(c) + 1) % d] = 2.0;
      spec.mixture.means.push_back(mean);
      spec.mixture.stddevs.push_back(0.5);
    }
    // split 0.5 so the train half has n/2 points
    const SplitDataset data = generate(spec);
    const LossModel loss = make_logistic(d);
    ModelBank bank = make_bank(k, loss.shape);
    for (Vec& theta : bank.params)
      for (double& v : theta) v = rng.uniform(-1.0, 1.0);
    bench_case("logistic-d16", bank, data.train, loss, 0.3, reps);
  }

  return 0;
}
