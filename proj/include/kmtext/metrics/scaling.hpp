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

// Parameter and compute accounting for BART-style encoder-decoder models.

#pragma once

#include <cstdint>

#include "kmtext/error.hpp"

namespace kmtext::metrics {

struct ModelDims {
  int64_t layers_enc = 6;
  int64_t layers_dec = 6;
  int64_t d_model = 512;
  int64_t d_ff = 2048;
  int64_t heads = 8;
  int64_t vocab = 32000;
  int64_t max_positions = 1024;

  void Validate() const {
    if (d_model <= 0 || heads <= 0 || d_model % heads != 0) {
      throw ConfigError("d_model must be a positive multiple of heads");
    }
    if (layers_enc < 0 || layers_dec < 0 || d_ff <= 0 || vocab <= 0) {
      throw ConfigError("model dimensions must be positive");
    }
  }

  static ModelDims Base() { return {}; }
  static ModelDims Big() { return {6, 6, 1024, 4096, 16, 32000, 1024}; }
};

// Attention block: Q, K, V, output projections with biases.
inline int64_t AttentionParams(const ModelDims& m) { return 4 * m.d_model * m.d_model + 4 * m.d_model; }
inline int64_t FeedForwardParams(const ModelDims& m) {
  return 2 * m.d_model * m.d_ff + m.d_ff + m.d_model;
}
inline int64_t LayerNormParams(const ModelDims& m) { return 2 * m.d_model; }

// Shared token embedding (tied with the output projection), learned
// positions for encoder and decoder, an embedding LayerNorm and a final
// LayerNorm on each side.
inline int64_t ParamCount(const ModelDims& m) {
  m.Validate();
  const int64_t embed = m.vocab * m.d_model;
  const int64_t positions = 2 * m.max_positions * m.d_model;
  const int64_t enc_layer = AttentionParams(m) + FeedForwardParams(m) + 2 * LayerNormParams(m);
  const int64_t dec_layer = 2 * AttentionParams(m) + FeedForwardParams(m) + 3 * LayerNormParams(m);
  const int64_t side_norms = 2 * 2 * LayerNormParams(m);
  return embed + positions + m.layers_enc * enc_layer + m.layers_dec * dec_layer + side_norms;
}

inline int64_t NonEmbeddingParams(const ModelDims& m) {
  return ParamCount(m) - m.vocab * m.d_model - 2 * m.max_positions * m.d_model;
}

// Training FLOPs per token in the Chinchilla style (forward plus a 2x
// backward pass), sequence length one, embeddings excluded. Counts Q/K/V,
// attention logits, softmax, value reduction and output projection per
// attention block, the two feed-forward matmuls, and the output logits.
inline double FlopsPerToken(const ModelDims& m, int64_t seq_len = 1) {
  m.Validate();
  const auto s = static_cast<double>(seq_len);
  const auto d = static_cast<double>(m.d_model);
  const auto h = static_cast<double>(m.heads);
  const double attention = 2 * 3 * s * d * d          // q, k, v
                           + 2 * s * s * d            // q @ k
                           + 3 * h * s * s            // softmax
                           + 2 * s * s * d            // weights @ v
                           + 2 * s * d * d;           // output projection
  const double dense = 2 * s * 2 * d * static_cast<double>(m.d_ff);
  const double logits = 2 * s * d * static_cast<double>(m.vocab);
  const double forward = static_cast<double>(m.layers_enc) * (attention + dense) +
                         static_cast<double>(m.layers_dec) * (2 * attention + dense) + logits;
  return 3 * forward / s;
}

// Compute-optimal parameter count at 20 training tokens per parameter.
inline double ChinchillaOptimalParams(double tokens) { return tokens / 20.0; }

}  // namespace kmtext::metrics
