#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <string>

#include "appsquat/embedding.hpp"

namespace appsquat {

struct RemoteEmbedderOptions {
  std::string endpoint;  // http://host[:port][/prefix]
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout{30'000};
  std::size_t max_in_flight = 2;
  unsigned max_retries = 2;
  std::chrono::milliseconds backoff{100};
};

// Client for the embedding sidecar:
//   GET  /health -> {"status":"ok","model":..., "dim":...}
//   POST /embed  {"texts":[...]} -> {"model":..., "dim":..., "embeddings":[[...], ...]}
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  // Throws ArgumentError for an unusable endpoint or option.
  explicit RemoteEmbedder(RemoteEmbedderOptions options);

  // 0 until health() or embed() has learned the dimension.
  std::size_t dim() const override;
  const std::string& model() const { return model_; }

  // Batches run with at most max_in_flight requests outstanding. Transport
  // failures are retried with exponential backoff; anything else, or running
  // out of retries, throws PipelineError (ProtocolError for contract breaks).
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  bool health() override;

 private:
  std::vector<EmbeddingVector> run_batch(std::size_t index, std::span<const std::string> texts) const;

  RemoteEmbedderOptions options_;
  std::string host_;
  int port_ = 80;
  std::string prefix_;
  mutable std::mutex mu_;
  std::string model_;
  std::size_t dim_ = 0;
};

}  // namespace appsquat
