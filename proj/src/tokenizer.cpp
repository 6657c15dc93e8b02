// Copyright 2026 The vqsyn Authors
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

#include "vqsyn/tokenizer.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "vqsyn/error.hpp"

namespace vqsyn {

int codebook_window(const Codebook& cb) {
  const int w = window_for_dim(static_cast<int>(cb.dim()));
  if (w == 0)
    fail(ErrorCode::DimensionMismatch,
         fmt::format("codebook dimension {} does not match any descriptor window", cb.dim()));
  return w;
}

namespace {

void check_bound(const Codebook& cb, int window) {
  check_window(window);
  if (static_cast<std::size_t>(descriptor_dim(window)) != cb.dim())
    fail(ErrorCode::DimensionMismatch, fmt::format("window {} gives descriptor dimension {}, codebook has {}", window,
                                                   descriptor_dim(window), cb.dim()));
}

}  // namespace

TokenSeq encode(const Chain& chain, const Codebook& cb, int window) {
  check_bound(cb, window);
  TokenSeq seq;
  seq.codebook_id = cb.id;
  seq.window = window;
  const auto descriptors = chain_descriptors(chain, window);
  seq.tokens.reserve(descriptors.size());
  for (const auto& desc : descriptors) seq.tokens.push_back(quantize(desc.values, cb));
  return seq;
}

void validate_code_descriptor(std::span<const double> values, int window, std::size_t token) {
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      fail(ErrorCode::InvalidInternalCoordinate, fmt::format("code {} entry {} is not finite", token, i));
  for (std::size_t i = 0; i + 1 < w; ++i)
    if (!(values[i] > 0.0))
      fail(ErrorCode::InvalidInternalCoordinate, fmt::format("code {} bond {} = {} is not positive", token, i, values[i]));
  for (std::size_t i = 0; i + 2 < w; ++i) {
    const double a = values[w - 1 + i];
    if (!(a > 0.0 && a < std::numbers::pi))
      fail(ErrorCode::InvalidInternalCoordinate, fmt::format("code {} angle {} = {} outside (0, pi)", token, i, a));
  }
}

Chain decode(const TokenSeq& seq, const Codebook& cb, std::string label) {
  if (seq.codebook_id != cb.id)
    fail(ErrorCode::MismatchedCodebook,
         fmt::format("tokens bound to '{}', codebook is '{}'", seq.codebook_id, cb.id));
  const int w = seq.window;
  check_bound(cb, w);
  const std::size_t n = seq.tokens.size();
  if (n < kMinChainLength || n < static_cast<std::size_t>(w))
    fail(ErrorCode::ChainTooShort, fmt::format("{} tokens cannot fill a window of {}", n, w));
  for (std::size_t t = 0; t < n; ++t) {
    const Token k = seq.tokens[t];
    if (k < 0 || static_cast<std::size_t>(k) >= cb.size())
      fail(ErrorCode::TokenOutOfRange, fmt::format("position {}: token {} outside [0, {})", t, k, cb.size()));
  }

  std::vector<unsigned char> checked(cb.size(), 0);
  auto code = [&](std::size_t t) {
    const auto k = static_cast<std::size_t>(seq.tokens[t]);
    if (!checked[k]) {
      validate_code_descriptor(cb.row(k), w, k);
      checked[k] = 1;
    }
    return cb.row(k);
  };

  const auto h = static_cast<std::size_t>(w - 1) / 2;
  const auto head = code(0);
  const auto seed = seed_frame(head[0], head[1], head[static_cast<std::size_t>(w) - 1]);

  std::vector<InternalCoord> steps;
  steps.reserve(n - 3);
  for (std::size_t j = 3; j < n; ++j) {
    const std::size_t t = j - 1;
    std::size_t source = t;
    std::size_t start = t - h;
    if (t < h) {
      source = 0;
      start = 0;
    } else if (t + h > n - 1) {
      source = n - 1;
      start = n - static_cast<std::size_t>(w);
    }
    steps.push_back(descriptor_step(code(source), w, static_cast<int>(j - start)));
  }
  return rebuild_chain(steps, seed, std::move(label));
}

RoundTrip roundtrip_report(const Chain& chain, const Codebook& cb, int window) {
  const Chain rebuilt = decode(encode(chain, cb, window), cb, chain.label);
  RoundTrip out;
  out.rmsd = rmsd_aligned(chain, rebuilt);
  if (chain.size() >= 16) out.tm_score = tm_score(rebuilt, chain);
  return out;
}

}  // namespace vqsyn
