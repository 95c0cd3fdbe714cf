#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "forage/engine.hpp"
#include "forage/io.hpp"

namespace forage {

// Outgoing message queue for one stream subscriber.
class Subscriber {
public:
    // Blocks up to timeout; returns false if nothing arrived or the stream closed.
    bool pop(std::string& out, std::chrono::milliseconds timeout);
    void push(std::string msg);
    void close();
    bool closed() const;

private:
    friend class Session;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::string> queue_;
    bool closed_ = false;
    bool needs_snapshot_ = true;
};

// Live simulation driven by a single worker. Commands are queued and applied
// at step boundaries; food and parameter commands enter the event log so the
// session replays through verify_log.
class Session {
public:
    Session(const RunConfig& config, double steps_per_second);

    // Parses and enqueues a command. The future resolves once the worker has
    // applied it, with an ack or a structured error reply.
    std::future<json> submit(const json& command);

    // One worker iteration: applies queued commands, then advances at most
    // budget steps (fewer when paused). Returns the number of steps taken.
    long long tick(long long budget);

    // Worker loop pacing tick() by the configured speed until stop().
    void run_worker();
    void stop();

    std::shared_ptr<Subscriber> subscribe();
    void unsubscribe(const std::shared_ptr<Subscriber>& s);

    json snapshot() const;
    // Event log so far, closed with an end entry at the current step.
    std::string log_text() const;
    long long steps() const;
    bool paused() const;

private:
    struct Pending {
        json command;
        std::promise<json> reply;
    };
    json apply(const json& command);
    void publish(bool force);

    mutable std::mutex mu_;
    Simulation sim_;
    EventLog log_;
    DeltaTracker tracker_;
    std::deque<Pending> pending_;
    std::vector<std::shared_ptr<Subscriber>> subs_;
    bool paused_ = false;
    long long step_credit_ = 0;
    double speed_;
    long long last_frame_step_ = -1;
    bool stopping_ = false;
    std::condition_variable wake_;
};

json error_reply(const json& id, const std::string& message);

// HTTP binding: GET /stream (chunked, length-delimited frames), POST /command,
// GET /snapshot, GET /log. Address from FORAGE_BIND ("host:port"), default
// 127.0.0.1:8080. Blocks until the server stops.
struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
};
ServeOptions serve_options_from_env();
class HttpService {
public:
    explicit HttpService(Session& session);
    ~HttpService();
    // Binds and serves on the calling thread.
    bool listen(const ServeOptions& opts);
    // Binds to an ephemeral port on host and returns it; serve with listen_after_bind().
    int bind_any(const std::string& host);
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace forage
