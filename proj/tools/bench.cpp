#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "dspectra/fourier.hpp"
#include "dspectra/measure.hpp"
#include "dspectra/spec_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dspectra;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* t = std::getenv("DYADIC_SPECTRA_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    long long N = argc > 1 ? std::atoll(argv[1]) : 2048;
    std::printf("threads: %d\n", threads);

    DyadicMeasure mu = random_sparse_measure(7, 16, 2000);

    auto t0 = std::chrono::steady_clock::now();
    SpectrumTable par = fourier_stieltjes(mu, N);
    double t_par = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    SpectrumTable ser = fourier_stieltjes_serial(mu, N);
    double t_ser = ms_since(t0);
    double max_diff = 0;
    for (long long n = -N; n <= N; ++n)
        max_diff = std::max(max_diff, std::abs(par.at(n) - ser.at(n)));
    std::printf("fourier_stieltjes  N=%lld  parallel %.1f ms  serial %.1f ms  speedup %.2fx  max|diff| %.3g\n",
                N, t_par, t_ser, t_ser / t_par, max_diff);

    DyadicMeasure nu = random_sparse_measure(11, 16, 2000);
    t0 = std::chrono::steady_clock::now();
    DyadicMeasure cp = convolve(mu, nu);
    double c_par = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    DyadicMeasure cs = convolve_serial(mu, nu);
    double c_ser = ms_since(t0);
    bool equal = cp.atoms == cs.atoms;
    std::printf("convolve  %zu x %zu atoms  parallel %.1f ms  serial %.1f ms  speedup %.2fx  exact-equal %s\n",
                mu.atoms.size(), nu.atoms.size(), c_par, c_ser, c_ser / c_par, equal ? "yes" : "no");
    return equal ? 0 : 1;
}
