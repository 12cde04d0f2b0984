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

// Umbrella header.

#pragma once

#include "kmtext/curate.hpp"
#include "kmtext/error.hpp"
#include "kmtext/io.hpp"
#include "kmtext/metrics/bleu.hpp"
#include "kmtext/metrics/bootstrap.hpp"
#include "kmtext/metrics/char_lm.hpp"
#include "kmtext/metrics/chrf.hpp"
#include "kmtext/metrics/corpus_metric.hpp"
#include "kmtext/metrics/delta_s.hpp"
#include "kmtext/metrics/rouge.hpp"
#include "kmtext/metrics/scaling.hpp"
#include "kmtext/metrics/summarize.hpp"
#include "kmtext/metrics/tokenizer_stats.hpp"
#include "kmtext/noise.hpp"
#include "kmtext/normalize.hpp"
#include "kmtext/parallel.hpp"
#include "kmtext/pipeline.hpp"
#include "kmtext/random.hpp"
#include "kmtext/segment.hpp"
#include "kmtext/subword.hpp"
#include "kmtext/unicode.hpp"
