#include <doctest.h>

#include <omp.h>

#include <random>

#include "qpack/fdtd.hpp"
#include "qpack/scenario.hpp"

using namespace qpack;

namespace {

SolverState package_state() {
  PackageParams p;
  p.gap_delta = 2.0e-3;
  const PreparedScene prep = prepare_scene(p, GridOptions{});
  return initialize(prep.grid, prep.scene.ports, {}, {});
}

void randomize(YeeFields& f, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t q = 0; q < f.e(a).size(); ++q) f.e(a).data()[q] = u(rng);
    for (std::size_t q = 0; q < f.h(a).size(); ++q) f.h(a).data()[q] = u(rng);
  }
}

bool same(const YeeFields& a, const YeeFields& b) {
  for (int c = 0; c < 3; ++c)
    if (!(a.e(c) == b.e(c)) || !(a.h(c) == b.h(c))) return false;
  return true;
}

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  SolverState st = package_state();
  const UpdateCoefficients& c = st.coefficients();
  YeeFields init = st.fields();
  randomize(init, 3);
  for (int threads : {1, 2, 3, 5}) {
    omp_set_num_threads(threads);
    YeeFields a = init, b = init;
    for (int q = 0; q < 5; ++q) {
      kernels::update_h_serial(a, c);
      kernels::update_e_serial(a, c);
      kernels::update_h_parallel(b, c);
      kernels::update_e_parallel(b, c);
    }
    CHECK(same(a, b));

    std::vector<double> pa, pb;
    kernels::energy_partials_serial(a, c, st.dt(), pa);
    kernels::energy_partials_parallel(b, c, st.dt(), pb);
    CHECK(pa == pb);

    PhasorFields fa(6e9, st.spec().dims), fb(6e9, st.spec().dims);
    const std::complex<double> we{0.25, -0.5}, wh{-0.125, 0.75};
    for (int q = 0; q < 3; ++q) {
      kernels::accumulate_dft_serial(a, fa, we, wh);
      kernels::accumulate_dft_parallel(b, fb, we, wh);
    }
    CHECK(fa.ex == fb.ex);
    CHECK(fa.ey == fb.ey);
    CHECK(fa.ez == fb.ez);
    CHECK(fa.hx == fb.hx);
    CHECK(fa.hy == fb.hy);
    CHECK(fa.hz == fb.hz);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("zero fields stay exactly zero") {
  SolverState st = package_state();
  for (Execution x : {Execution::Serial, Execution::Parallel}) {
    YeeFields f = st.fields();
    for (int q = 0; q < 10; ++q) {
      kernels::update_h(x, f, st.coefficients());
      kernels::update_e(x, f, st.coefficients());
    }
    CHECK(same(f, st.fields()));
  }
}

TEST_CASE("tangential E on the enclosure walls stays exactly zero") {
  SolverState st = package_state();
  YeeFields& f = st.mutable_fields();
  randomize(f, 9);
  // Start from a field that satisfies the boundary condition, then keep stepping.
  for (int a = 0; a < 3; ++a) {
    const auto& ce = st.coefficients().ce(a);
    for (std::size_t q = 0; q < ce.size(); ++q)
      if (ce.data()[q] == 0.0) f.e(a).data()[q] = 0.0;
  }
  for (int q = 0; q < 20; ++q) step(st);
  const auto [nx, ny, nz] = st.spec().dims;
  const YeeFields& g = st.fields();
  double worst = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        if (j == 0 || j == ny || k == 0 || k == nz) worst = std::max(worst, std::abs(g.ex(i, j, k)));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k <= nz; ++k)
        if (i == 0 || i == nx || k == 0 || k == nz) worst = std::max(worst, std::abs(g.ey(i, j, k)));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k < nz; ++k)
        if (i == 0 || i == nx || j == 0 || j == ny) worst = std::max(worst, std::abs(g.ez(i, j, k)));
  CHECK(worst == 0.0);
}

TEST_CASE("field array shapes follow the Yee staggering") {
  const YeeFields f({4, 5, 6});
  CHECK(f.ex.dims() == Index3{4, 6, 7});
  CHECK(f.ey.dims() == Index3{5, 5, 7});
  CHECK(f.ez.dims() == Index3{5, 6, 6});
  CHECK(f.hx.dims() == Index3{5, 5, 6});
  CHECK(f.hy.dims() == Index3{4, 6, 6});
  CHECK(f.hz.dims() == Index3{4, 5, 7});
  CHECK(f.all_finite());
}
