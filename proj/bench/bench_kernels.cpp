// Serial reference kernels against their OpenMP versions on the K=5 spring slider.
#include <benchmark/benchmark.h>

#include "faultsim/fem.hpp"
#include "faultsim/mesh.hpp"
#include "faultsim/sparse.hpp"

using namespace faultsim;

namespace {

struct Setup {
  mesh::MeshHierarchy h;
  fem::DofMap coarse_dofs, dofs;
  fem::MaterialParams mat;
  CsrMatrix A, P;
  TripleProduct tp;
  std::vector<double> x, y;

  Setup() {
    auto spec = mesh::layered_spec(-2.5, 2.5, {-1.0, 0.0, 1.0});
    mesh::RefinementOptions opt;
    opt.max_levels = 5;
    h = mesh::refine_adaptive(mesh::build_initial_mesh(spec, 1.0), mesh::interfaces_of(spec), opt);
    const int k = h.finest();
    coarse_dofs = fem::DofMap::build(h.levels[k - 1]);
    dofs = fem::DofMap::build(h.levels[k]);
    A = fem::FreeBlock::build(fem::assemble_elasticity(h.fine(), dofs, mat), dofs).matrix;
    P = fem::prolongation(h.levels[k - 1], coarse_dofs, h.levels[k], dofs);
    tp = TripleProduct(P, A);
    x.assign(A.cols, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (1.0 + i);
    y.assign(A.rows, 0.0);
  }
};

Setup &setup() {
  static Setup s;
  return s;
}

Exec exec_of(const benchmark::State &st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_spmv(benchmark::State &st) {
  auto &s = setup();
  for (auto _ : st) {
    spmv(s.A, s.x, s.y, exec_of(st));
    benchmark::DoNotOptimize(s.y.data());
  }
  st.SetItemsProcessed(st.iterations() * s.A.nnz());
}

void BM_galerkin(benchmark::State &st) {
  auto &s = setup();
  CsrMatrix c = s.tp.pattern();
  for (auto _ : st) {
    s.tp.compute(s.P, s.A, {}, c, exec_of(st));
    benchmark::DoNotOptimize(c.val.data());
  }
  st.SetItemsProcessed(st.iterations() * s.tp.terms());
}

void BM_assembly(benchmark::State &st) {
  auto &s = setup();
  for (auto _ : st) {
    auto K = fem::assemble_elasticity(s.h.fine(), s.dofs, s.mat, exec_of(st));
    benchmark::DoNotOptimize(K.val.data());
  }
}

}  // namespace

BENCHMARK(BM_spmv)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_galerkin)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_assembly)->ArgName("parallel")->Arg(0)->Arg(1);

BENCHMARK_MAIN();
