// Throughput comparison of the serial reference replicate loop against the
// OpenMP kernel, on the bundled models. The two paths share the chunked
// reduction, so their results must agree bit for bit; the benchmark verifies
// that before it reports timings.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtsens/builtin.hpp"
#include "gtsens/estimator.hpp"

using namespace gtsens;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t n = 200000;
    if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);

#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
#else
    int max_threads = 1;
#endif
    std::printf("replicates per run: %llu, hardware threads: %d\n",
                static_cast<unsigned long long>(n), max_threads);
    std::printf("%-24s %12s %12s %9s %s\n", "model", "serial [s]", "parallel [s]", "speedup",
                "bit-identical");

    for (const std::string& name :
         {std::string("immigration"), std::string("pure-birth"),
          std::string("birth-annihilation"), std::string("gene-expression"),
          std::string("lotka-volterra")}) {
        ReactionNetwork net = builtin_model(name);
        Expression f = Expression::parse("x1", net.n_species());
        SimConfig cfg{1.0, 10'000'000, 12345, 0};

        auto t0 = std::chrono::steady_clock::now();
        EstimatorResult serial = gt_estimate(net, f, 0, cfg, n, 1);
        double t_serial = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        EstimatorResult parallel = gt_estimate(net, f, 0, cfg, n, 0);
        double t_parallel = seconds_since(t0);

        bool identical = std::memcmp(&serial.mean, &parallel.mean, sizeof(double)) == 0 &&
                         std::memcmp(&serial.variance, &parallel.variance, sizeof(double)) == 0;
        std::printf("%-24s %12.3f %12.3f %8.2fx %s\n", name.c_str(), t_serial, t_parallel,
                    t_serial / t_parallel, identical ? "yes" : "NO");
        if (!identical) return 1;
    }
    return 0;
}
