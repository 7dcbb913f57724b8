// Compares the parallel curve-set registration against the serial reference
// implementation: wall time for each, speedup, and a bitwise agreement check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "warpreg/reference.hpp"
#include "warpreg/registration.hpp"
#include "warpreg/simulate.hpp"

using namespace warpreg;

namespace {

double time_call(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n_curves = 24;
  std::uint64_t seed = 20240501;
  int repeat = 1;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&]() -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", a.c_str());
        std::exit(1);
      }
      return argv[++i];
    };
    if (a == "--curves")
      n_curves = std::atoi(next());
    else if (a == "--seed")
      seed = std::strtoull(next(), nullptr, 10);
    else if (a == "--repeat")
      repeat = std::atoi(next());
    else {
      std::fprintf(stderr, "usage: bench_register [--curves N] [--seed S] [--repeat R]\n");
      return a == "--help" ? 0 : 1;
    }
  }

  DatasetConfig dcfg;
  dcfg.n_curves = n_curves;
  dcfg.seed = seed;
  dcfg.validate();
  SyntheticDataset ds = generate(dcfg);

  RegistrationConfig cfg;
  ReferenceChoice choice = select_reference_power(ds.curves);
  int ref = choice.index;

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("curves=%d ref=%d threads=%d repeat=%d\n", n_curves, ref, threads, repeat);

  std::vector<RegistrationResult> serial, parallel;
  double t_serial = 0.0, t_parallel = 0.0;
  for (int r = 0; r < repeat; ++r) {
    t_serial += time_call([&] { serial = register_set_serial(ds.curves, ref, cfg); });
    t_parallel += time_call([&] { parallel = register_set(ds.curves, ref, cfg); });
  }
  t_serial /= repeat;
  t_parallel /= repeat;

  int mismatches = 0;
  for (std::size_t i = 0; i < serial.size(); ++i) {
    bool same = serial[i].failed == parallel[i].failed &&
                serial[i].criterion == parallel[i].criterion &&
                serial[i].amplitude == parallel[i].amplitude &&
                serial[i].warp.coeffs.size() == parallel[i].warp.coeffs.size();
    if (same)
      for (int k = 0; k < serial[i].warp.coeffs.size(); ++k)
        if (serial[i].warp.coeffs[k] != parallel[i].warp.coeffs[k]) same = false;
    if (!same) {
      ++mismatches;
      std::fprintf(stderr, "mismatch on curve %zu\n", i);
    }
  }

  std::printf("serial:   %.3f s (%.1f ms/curve)\n", t_serial, 1e3 * t_serial / n_curves);
  std::printf("parallel: %.3f s (%.1f ms/curve)\n", t_parallel, 1e3 * t_parallel / n_curves);
  std::printf("speedup:  %.2fx\n", t_serial / t_parallel);
  std::printf("agreement: %s\n", mismatches == 0 ? "bitwise identical" : "MISMATCH");
  return mismatches == 0 ? 0 : 1;
}
