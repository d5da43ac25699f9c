/*
 * Copyright 2026 The ehrflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <filesystem>

#include "ehrflow/assembler.h"
#include "ehrflow/featurizer.h"
#include "ehrflow/problem.h"
#include "ehrflow/synth.h"

namespace ehrflow {
namespace {

struct NoShowWorld {
  EntitySet es;
  LabelTimes labels;
  std::vector<FeatureDef> defs;
};

NoShowWorld Build(size_t patients, int depth) {
  const auto reg = LoadSchema(std::filesystem::path(EHRFLOW_BENCH_DATA_DIR) /
                              "schemas" / "noshow.yaml");
  SynthOptions opts;
  opts.n_patients = patients;
  NoShowWorld w;
  w.es = AssembleTables(GenerateSyntheticTables(reg, opts), reg);
  const auto problem = ProblemSpec::Defaults(ProblemName::kNoShow);
  w.labels = GenerateLabelTimes(w.es, problem);
  FeaturizerSettings s;
  s.max_depth = depth;
  s.exclude = problem.LeakyVariables();
  w.defs = EnumerateFeatures(w.es, problem.target_entity, s);
  return w;
}

void BM_Enumerate(benchmark::State& state) {
  const auto w = Build(200, 2);
  FeaturizerSettings s;
  s.max_depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EnumerateFeatures(w.es, "appointment", s));
  }
}
BENCHMARK(BM_Enumerate)->DenseRange(0, 2);

void BM_ComputeFeatureMatrix(benchmark::State& state) {
  const auto w = Build(static_cast<size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeFeatureMatrix(w.es, w.labels, w.defs));
  }
  state.SetItemsProcessed(
      static_cast<int64_t>(state.iterations() * w.labels.rows.size() * w.defs.size()));
}
BENCHMARK(BM_ComputeFeatureMatrix)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_AggregateSkew(benchmark::State& state) {
  std::vector<double> xs(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>((i * 37) % 101);
  for (auto _ : state) benchmark::DoNotOptimize(AggregateNumeric("skew", xs));
}
BENCHMARK(BM_AggregateSkew)->Arg(16)->Arg(1024);

}  // namespace
}  // namespace ehrflow

BENCHMARK_MAIN();
