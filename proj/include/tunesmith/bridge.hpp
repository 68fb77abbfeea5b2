/**
 * @file bridge.hpp
 * @brief Client for external scorers speaking the newline-delimited JSON protocol.
 *
 * Requests:
 *   {"id": 0, "op": "hello", "version": "1"}        -> {"ok": true, "version": "1"}
 *   {"id": n, "op": "next", "context": [...], "top_k": k}
 *                                                   -> {"id": n, "candidates": [{"word", "logprob"}]}
 *   {"id": n, "op": "score", "words": [...]}        -> {"id": n, "logprob": x}
 * A response {"id": n, "error": "..."} is a model error, not a transport error.
 */
#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunesmith/error.hpp"
#include "tunesmith/lm.hpp"
#include "tunesmith/text.hpp"

namespace tunesmith {

inline constexpr std::string_view kProtocolVersion = "1";

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void write_line(std::string_view line) = 0;
  /// nullopt on timeout. Throws TransportError(transport_closed) at end of stream.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
};

/// Child process whose stdin/stdout carry the protocol.
class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error(Errc::invalid_argument, "bridge command is empty");
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw TransportError(Errc::transport_closed, "pipe failed");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw TransportError(Errc::transport_closed, "pipe failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw TransportError(Errc::transport_closed, "fork failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      std::vector<char*> args;
      for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    ::signal(SIGPIPE, SIG_IGN);
  }

  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  ~ProcessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      // Closing stdin is the shutdown signal; give the child a moment, then kill it.
      for (int i = 0; i < 50; ++i) {
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        ::usleep(10000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  void write_line(std::string_view line) override {
    std::string buf(line);
    buf += '\n';
    std::size_t off = 0;
    while (off < buf.size()) {
      ssize_t n = ::write(write_fd_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(Errc::transport_closed, std::string("write to bridge failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd pfd{read_fd_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw TransportError(Errc::transport_closed, "poll failed");
      }
      if (rc == 0) return std::nullopt;
      char chunk[4096];
      ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(Errc::transport_closed, "read from bridge failed");
      }
      if (n == 0) throw TransportError(Errc::transport_closed, "bridge closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
};

/// Scorer backed by a bridge connection. Requests are serialized per connection.
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(std::unique_ptr<LineChannel> channel,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(10000))
      : channel_(std::move(channel)), timeout_(timeout) {}

  /// Exchanges the hello handshake. Must succeed before other requests.
  void handshake() {
    std::lock_guard lock(mutex_);
    nlohmann::json req{{"id", 0}, {"op", "hello"}, {"version", kProtocolVersion}};
    auto resp = round_trip(req, std::nullopt);
    if (!resp.contains("ok") || resp["ok"] != true || !resp.contains("version") ||
        !resp["version"].is_string() || resp["version"].get<std::string>() != kProtocolVersion) {
      throw TransportError(Errc::transport_protocol, "handshake rejected: " + resp.dump());
    }
  }

  std::vector<Candidate> next_candidates(const Context& context, std::size_t top_k) const override {
    std::lock_guard lock(mutex_);
    const auto id = next_id_++;
    nlohmann::json req{{"id", id}, {"op", "next"}, {"context", context.history}, {"top_k", top_k}};
    auto resp = round_trip(req, id);
    if (!resp.contains("candidates") || !resp["candidates"].is_array()) {
      throw TransportError(Errc::transport_protocol, "response lacks a candidates array");
    }
    std::vector<Candidate> out;
    for (const auto& c : resp["candidates"]) {
      if (!c.is_object() || !c.contains("word") || !c["word"].is_string() || !c.contains("logprob") ||
          !c["logprob"].is_number()) {
        throw TransportError(Errc::transport_protocol, "malformed candidate " + c.dump());
      }
      Candidate cand{c["word"].get<std::string>(), c["logprob"].get<double>()};
      if (cand.word.empty() || cand.word == kBoundary ||
          std::any_of(cand.word.begin(), cand.word.end(), is_space)) {
        throw TransportError(Errc::transport_protocol, "candidate is not a complete word: '" + cand.word + "'");
      }
      if (!(cand.logprob <= 0.0)) {
        throw TransportError(Errc::transport_protocol, "candidate logprob must be <= 0");
      }
      out.push_back(std::move(cand));
    }
    std::sort(out.begin(), out.end(), candidate_before);
    if (out.size() > top_k) out.resize(top_k);
    return out;
  }

  double sequence_logprob(std::span<const std::string> words) const override {
    std::lock_guard lock(mutex_);
    const auto id = next_id_++;
    nlohmann::json req{{"id", id}, {"op", "score"}, {"words", std::vector<std::string>(words.begin(), words.end())}};
    auto resp = round_trip(req, id);
    if (!resp.contains("logprob") || !resp["logprob"].is_number()) {
      throw TransportError(Errc::transport_protocol, "response lacks a numeric logprob");
    }
    return resp["logprob"].get<double>();
  }

 private:
  nlohmann::json round_trip(const nlohmann::json& request, std::optional<std::int64_t> expected_id) const {
    channel_->write_line(request.dump());
    auto line = channel_->read_line(timeout_);
    if (!line) throw TransportError(Errc::transport_timeout, "no response within " + std::to_string(timeout_.count()) + " ms");
    nlohmann::json resp;
    try {
      resp = nlohmann::json::parse(*line);
    } catch (const nlohmann::json::parse_error&) {
      throw TransportError(Errc::transport_protocol, "malformed response: " + *line);
    }
    if (!resp.is_object()) throw TransportError(Errc::transport_protocol, "response is not an object");
    if (expected_id) {
      if (!resp.contains("id") || !resp["id"].is_number_integer() || resp["id"].get<std::int64_t>() != *expected_id) {
        throw TransportError(Errc::transport_protocol,
                             "response id mismatch, expected " + std::to_string(*expected_id) + ": " + *line);
      }
    }
    if (resp.contains("error")) {
      throw Error(Errc::model, resp["error"].is_string() ? resp["error"].get<std::string>() : resp["error"].dump());
    }
    return resp;
  }

  std::unique_ptr<LineChannel> channel_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mutex_;
  mutable std::int64_t next_id_ = 1;
};

/// Spawns a bridge command and completes the handshake.
inline std::unique_ptr<RemoteScorer> connect_bridge(const std::vector<std::string>& argv,
                                                    std::chrono::milliseconds timeout = std::chrono::milliseconds(10000)) {
  auto scorer = std::make_unique<RemoteScorer>(std::make_unique<ProcessChannel>(argv), timeout);
  scorer->handshake();
  return scorer;
}

}  // namespace tunesmith
