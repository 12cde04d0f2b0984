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

#include <functional>
#include <string>
#include <vector>

#include "kmtext/error.hpp"

namespace kmtext::metrics {

// A corpus metric expressed through additive per-segment statistics, so
// that resampling only has to re-sum vectors.
struct CorpusMetric {
  std::string name;
  std::function<std::vector<double>(const std::string& hyp, const std::string& ref)> segment_stats;
  std::function<double(const std::vector<double>& summed)> score;

  std::vector<std::vector<double>> AllStats(const std::vector<std::string>& hyps,
                                            const std::vector<std::string>& refs) const {
    if (hyps.size() != refs.size()) {
      throw LengthMismatch(name + ": " + std::to_string(hyps.size()) + " hypotheses vs " +
                           std::to_string(refs.size()) + " references");
    }
    std::vector<std::vector<double>> out;
    out.reserve(hyps.size());
    for (size_t i = 0; i < hyps.size(); ++i) out.push_back(segment_stats(hyps[i], refs[i]));
    return out;
  }

  double Score(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) const {
    return ScoreStats(AllStats(hyps, refs));
  }

  double ScoreStats(const std::vector<std::vector<double>>& stats) const {
    std::vector<double> sum;
    for (const auto& s : stats) {
      if (sum.empty()) sum.assign(s.size(), 0.0);
      for (size_t k = 0; k < s.size(); ++k) sum[k] += s[k];
    }
    return score(sum);
  }
};

}  // namespace kmtext::metrics
