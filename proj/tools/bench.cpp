// Wall-clock comparison of the OpenMP kernels against their serial reference
// implementations, verifying bitwise-identical results along the way.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "spectral/ensembles.hpp"
#include "spectral/parallel.hpp"
#include "spectral/pseudospectrum.hpp"
#include "spectral/regularize.hpp"

namespace {

double time_once(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              name, serial, parallel, serial / parallel,
              identical ? "bitwise-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-bench: OpenMP kernels vs serial reference"};
  int workers = spectral::resolve_workers(std::nullopt);
  app.add_option("--workers", workers, "parallel worker count")
      ->check(CLI::Range(1, 4096));
  CLI11_PARSE(app, argc, argv);
  std::printf("workers: %d\n", workers);

  using spectral::cdouble;

  {
    spectral::CMatrix m = spectral::matrix_from_source("toeplitz-sample(16,7)");
    spectral::SminField fs, fp;
    double ts = time_once([&] {
      fs = spectral::smin_field_serial(m, cdouble(-3, -3), cdouble(3, 3), 101,
                                       101);
    });
    double tp = time_once([&] {
      fp = spectral::smin_field(m, cdouble(-3, -3), cdouble(3, 3), 101, 101,
                                workers);
    });
    report("smin_field 101x101 n=16", ts, tp, fs.values == fp.values);
  }

  {
    spectral::CMatrix m = spectral::matrix_from_source("toeplitz-sample(12,3)");
    double norm = spectral::operator_norm(m);
    spectral::RegionSpec region =
        spectral::RegionSpec::disk(cdouble(0, 0), norm + 1.0);
    double as = 0.0, ap = 0.0;
    double ts = time_once([&] {
      as = spectral::pseudospectrum_area_reference(m, 0.3, region, 250);
    });
    double tp = time_once([&] {
      ap = spectral::pseudospectrum_area(m, 0.3, region, 250, workers);
    });
    report("pseudospectrum_area res=250", ts, tp, as == ap);
  }

  {
    std::vector<double> grid = {0.05, 0.1, 0.2, 0.4};
    spectral::RngSpec spec{2024, 0};
    spectral::TailReport rs, rp;
    double ts = time_once(
        [&] { rs = spectral::verify_smin_law(8, grid, 20000, spec, 1); });
    double tp = time_once(
        [&] { rp = spectral::verify_smin_law(8, grid, 20000, spec, workers); });
    bool same = rs.points.size() == rp.points.size();
    for (std::size_t i = 0; same && i < rs.points.size(); ++i)
      same = rs.points[i].hits == rp.points[i].hits &&
             rs.points[i].ci.p_hat == rp.points[i].ci.p_hat;
    report("smin law n=8 20k trials", ts, tp, same);
  }

  {
    spectral::RngSpec spec{7, 1};
    spectral::BulkProfileReport rs, rp;
    double ts = time_once(
        [&] { rs = spectral::bulk_overlap_profile(30, 64, 10, spec, 1); });
    double tp = time_once([&] {
      rp = spectral::bulk_overlap_profile(30, 64, 10, spec, workers);
    });
    bool same = rs.mean_overlap_over_n == rp.mean_overlap_over_n &&
                rs.counts == rp.counts &&
                rs.total_over_n2 == rp.total_over_n2;
    report("bulk profile n=30 64 trials", ts, tp, same);
  }

  return 0;
}
