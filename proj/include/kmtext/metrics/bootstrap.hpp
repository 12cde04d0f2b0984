// Copyright 2026 The kmtext Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmtext/error.hpp"
#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/random.hpp"

namespace kmtext::metrics {

struct BootstrapResult {
  double score_a = 0.0;
  double score_b = 0.0;
  double p_value = 1.0;
  int winner = 0;  // 0: a, 1: b, -1: observed tie
};

// Paired bootstrap resampling. The observed winner is the system with the
// higher full-corpus score; p is the fraction of resamples in which it does
// not score strictly higher. Observed ties give p = 1.
inline BootstrapResult PairedBootstrap(const std::vector<std::string>& hyp_a,
                                       const std::vector<std::string>& hyp_b,
                                       const std::vector<std::string>& refs,
                                       const CorpusMetric& metric, int n_resamples = 1000,
                                       uint64_t seed = 12345) {
  if (hyp_a.size() != refs.size() || hyp_b.size() != refs.size()) {
    throw LengthMismatch("bootstrap: systems and references differ in length");
  }
  if (refs.size() < 2) throw ConfigError("bootstrap needs at least two segments");
  if (n_resamples < 1) throw ConfigError("bootstrap needs at least one resample");
  const auto stats_a = metric.AllStats(hyp_a, refs);
  const auto stats_b = metric.AllStats(hyp_b, refs);
  BootstrapResult r;
  r.score_a = metric.ScoreStats(stats_a);
  r.score_b = metric.ScoreStats(stats_b);
  if (r.score_a == r.score_b) {
    r.winner = -1;
    r.p_value = 1.0;
    return r;
  }
  r.winner = r.score_a > r.score_b ? 0 : 1;
  const auto& win = r.winner == 0 ? stats_a : stats_b;
  const auto& lose = r.winner == 0 ? stats_b : stats_a;
  Rng rng = Rng::Keyed(seed, "paired-bootstrap", 0);
  const size_t n = refs.size();
  std::vector<std::vector<double>> sample_w(n), sample_l(n);
  int losses = 0;
  for (int k = 0; k < n_resamples; ++k) {
    for (size_t i = 0; i < n; ++i) {
      const size_t j = rng.Uniform(n);
      sample_w[i] = win[j];
      sample_l[i] = lose[j];
    }
    if (!(metric.ScoreStats(sample_w) > metric.ScoreStats(sample_l))) ++losses;
  }
  r.p_value = static_cast<double>(losses) / n_resamples;
  return r;
}

}  // namespace kmtext::metrics
