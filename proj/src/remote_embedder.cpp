#include "appsquat/remote_embedder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <regex>
#include <thread>

#include "appsquat/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace appsquat {
namespace {

using nlohmann::json;

constexpr double kRenormTolerance = 1e-6;
constexpr double kRejectTolerance = 1e-3;

std::string batch_label(std::size_t index) { return "embedding batch " + std::to_string(index); }

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options) : options_(std::move(options)) {
  static const std::regex url(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.endpoint, m, url)) {
    throw ArgumentError("embedding endpoint must look like http://host[:port][/prefix], got '" +
                        options_.endpoint + "'");
  }
  host_ = m[1].str();
  if (m[2].matched) port_ = std::stoi(m[2].str());
  if (port_ <= 0 || port_ > 65535) throw ArgumentError("embedding endpoint port out of range");
  prefix_ = m[3].matched ? m[3].str() : "";
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (options_.batch_size == 0) throw ArgumentError("embedding batch size must be >= 1");
  if (options_.max_in_flight == 0) throw ArgumentError("embedding in-flight limit must be >= 1");
}

std::size_t RemoteEmbedder::dim() const {
  std::lock_guard lock(mu_);
  return dim_;
}

bool RemoteEmbedder::health() {
  httplib::Client client(host_, port_);
  const auto secs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  auto res = client.Get(prefix_ + "/health");
  if (!res || res->status != 200) return false;
  try {
    const json body = json::parse(res->body);
    if (body.value("status", "") != "ok") return false;
    const auto dim = body.at("dim").get<std::size_t>();
    if (dim == 0) return false;
    std::lock_guard lock(mu_);
    model_ = body.value("model", "");
    dim_ = dim;
    return true;
  } catch (const json::exception&) {
    return false;
  }
}

std::vector<EmbeddingVector> RemoteEmbedder::run_batch(std::size_t index,
                                                       std::span<const std::string> texts) const {
  httplib::Client client(host_, port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const std::string payload = json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
  httplib::Result res;
  for (unsigned attempt = 0;; ++attempt) {
    res = client.Post(prefix_ + "/embed", payload, "application/json");
    if (res) break;
    if (attempt >= options_.max_retries) {
      throw PipelineError(batch_label(index) + " failed after " + std::to_string(attempt + 1) +
                          " attempts: " + httplib::to_string(res.error()));
    }
    std::this_thread::sleep_for(options_.backoff * (1 << attempt));
  }
  if (res->status != 200) {
    throw PipelineError(batch_label(index) + ": sidecar returned HTTP " + std::to_string(res->status) +
                        ": " + res->body.substr(0, 200));
  }

  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error&) {
    throw ProtocolError(batch_label(index) + ": response is not JSON");
  }
  const auto rows = body.find("embeddings");
  if (!body.is_object() || rows == body.end() || !rows->is_array()) {
    throw ProtocolError(batch_label(index) + ": response lacks an 'embeddings' array");
  }
  if (rows->size() != texts.size()) {
    throw ProtocolError(batch_label(index) + ": expected " + std::to_string(texts.size()) +
                        " vectors, got " + std::to_string(rows->size()));
  }
  std::optional<std::size_t> declared;
  if (auto d = body.find("dim"); d != body.end() && d->is_number_unsigned()) declared = d->get<std::size_t>();

  std::vector<EmbeddingVector> out;
  out.reserve(rows->size());
  for (const auto& row : *rows) {
    if (!row.is_array() || row.empty()) throw ProtocolError(batch_label(index) + ": malformed vector");
    EmbeddingVector v;
    v.values.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) throw ProtocolError(batch_label(index) + ": non-numeric vector component");
      const double value = x.get<double>();
      if (!std::isfinite(value)) throw ProtocolError(batch_label(index) + ": non-finite vector component");
      v.values.push_back(value);
    }
    if (declared && v.dim() != *declared) {
      throw ProtocolError(batch_label(index) + ": vector of dimension " + std::to_string(v.dim()) +
                          " but response declares " + std::to_string(*declared));
    }
    if (!out.empty() && v.dim() != out.front().dim()) {
      throw ProtocolError(batch_label(index) + ": inconsistent vector dimensions");
    }
    const double norm = l2_norm(v.values);
    if (std::abs(norm - 1.0) > kRejectTolerance) {
      throw ProtocolError(batch_label(index) + ": vector norm " + std::to_string(norm) + " is not unit");
    }
    if (std::abs(norm - 1.0) > kRenormTolerance) {
      for (double& c : v.values) c /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) {
  const std::size_t n_batches = (texts.size() + options_.batch_size - 1) / options_.batch_size;
  std::vector<std::vector<EmbeddingVector>> results(n_batches);
  std::vector<std::exception_ptr> errors(n_batches);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t b = next++; b < n_batches; b = next++) {
      const std::size_t begin = b * options_.batch_size;
      const std::size_t count = std::min(options_.batch_size, texts.size() - begin);
      try {
        results[b] = run_batch(b, texts.subspan(begin, count));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(options_.max_in_flight, n_batches);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    if (workers > 0) worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::size_t known_dim = dim();
  for (std::size_t b = 0; b < n_batches; ++b) {
    for (auto& v : results[b]) {
      if (known_dim == 0) known_dim = v.dim();
      if (v.dim() != known_dim) {
        throw ProtocolError(batch_label(b) + ": dimension " + std::to_string(v.dim()) +
                            " differs from " + std::to_string(known_dim));
      }
      out.push_back(std::move(v));
    }
  }
  if (known_dim != 0) {
    std::lock_guard lock(mu_);
    dim_ = known_dim;
  }
  return out;
}

}  // namespace appsquat
