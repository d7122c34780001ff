// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels.

#include <random>

#include <benchmark/benchmark.h>

#include "vic/fusion.hpp"
#include "vic/image.hpp"
#include "vic/sgrid.hpp"

namespace {

vic::Exec exec_of(const benchmark::State& state) {
  return state.range(0) ? vic::Exec::parallel : vic::Exec::serial;
}

vic::Image noise(int w, int h) {
  std::mt19937 rng(1);
  vic::Image img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
  return img;
}

void BM_resize(benchmark::State& state) {
  const auto src = noise(640, 360);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vic::resize_bilinear(src, 1024, 1024, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * 1024 * 1024);
}
BENCHMARK(BM_resize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_compose_grid(benchmark::State& state) {
  std::vector<vic::Image> frames;
  for (int i = 0; i < 30; ++i) frames.push_back(noise(320, 240));
  const auto src = vic::sgrid::FrameSource::from_images(vic::ItemId("v"), frames);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vic::sgrid::compose_grid(src, {3, 1024, 1024}, std::nullopt, exec_of(state)));
  }
}
BENCHMARK(BM_compose_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

std::vector<vic::ScoreMatrix> matrices(int sources, int queries, int items) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<vic::ScoreMatrix> out;
  for (int m = 0; m < sources; ++m) {
    std::map<vic::QueryId, vic::ScoreRow> rows;
    for (int q = 0; q < queries; ++q) {
      vic::ScoreRow row;
      for (int i = 0; i < items; ++i) row[vic::ItemId("i" + std::to_string(i))] = u(rng);
      rows.emplace(vic::QueryId("q" + std::to_string(q)), std::move(row));
    }
    out.emplace_back("m" + std::to_string(m), std::move(rows));
  }
  return out;
}

void BM_combmnz_all(benchmark::State& state) {
  const auto ms = matrices(3, 200, 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vic::fusion::fuse_scores_all(ms, {}, vic::fusion::ScoreMethod::combmnz, 100, 100, exec_of(state)));
  }
}
BENCHMARK(BM_combmnz_all)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_rrf_all(benchmark::State& state) {
  const auto ms = matrices(3, 200, 500);
  std::vector<vic::RunMap> runs;
  for (const auto& m : ms) {
    vic::RunMap run;
    for (const auto& [q, _] : m.rows()) run.emplace(q, vic::ranked_from_scores(m, q, 100));
    runs.push_back(std::move(run));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(vic::fusion::rrf_all(runs, {}, 100, exec_of(state)));
  }
}
BENCHMARK(BM_rrf_all)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
