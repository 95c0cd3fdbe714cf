#include "forage/service.hpp"

#include <climits>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include <httplib.h>

namespace forage {

namespace {

constexpr std::size_t kMaxBacklog = 4096;

}  // namespace

bool Subscriber::pop(std::string& out, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return false;
    out = std::move(queue_.front());
    queue_.pop_front();
    return true;
}

void Subscriber::push(std::string msg) {
    {
        std::lock_guard lock(mu_);
        if (closed_) return;
        if (queue_.size() >= kMaxBacklog) {
            closed_ = true;
        } else {
            queue_.push_back(std::move(msg));
        }
    }
    cv_.notify_all();
}

void Subscriber::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool Subscriber::closed() const {
    std::lock_guard lock(mu_);
    return closed_ && queue_.empty();
}

json error_reply(const json& id, const std::string& message) {
    return json{{"type", "error"}, {"version", kFormatVersion}, {"id", id}, {"error", message}};
}

Session::Session(const RunConfig& config, double steps_per_second) : sim_(config), speed_(steps_per_second) {
    if (!(speed_ > 0)) throw std::invalid_argument("speed must be positive");
    log_.header(config);
}

std::future<json> Session::submit(const json& command) {
    Pending p{command, {}};
    auto fut = p.reply.get_future();
    json id = command.is_object() && command.contains("id") ? command["id"] : json(nullptr);
    if (!command.is_object() || !command.contains("cmd") || !command["cmd"].is_string()) {
        p.reply.set_value(error_reply(id, "command must be an object with a string 'cmd'"));
        return fut;
    }
    if (command.contains("version") && command["version"] != kFormatVersion) {
        p.reply.set_value(error_reply(id, "unsupported version"));
        return fut;
    }
    {
        std::lock_guard lock(mu_);
        pending_.push_back(std::move(p));
    }
    wake_.notify_all();
    return fut;
}

json Session::apply(const json& c) {
    const std::string cmd = c["cmd"];
    json id = c.contains("id") ? c["id"] : json(nullptr);
    const long long t = sim_.steps_done();
    try {
        if (cmd == "place_food" || cmd == "remove_food" || cmd == "move_food") {
            FoodEvent e;
            e.step = t;
            if (cmd == "place_food") {
                e.action = FoodEvent::Action::Place;
                e.at = coord_from(c.at("at"));
            } else if (cmd == "remove_food") {
                e.action = FoodEvent::Action::Remove;
                e.at = coord_from(c.at("at"));
            } else {
                e.action = FoodEvent::Action::Move;
                e.at = coord_from(c.at("from"));
                e.to = coord_from(c.at("to"));
            }
            const Lattice& lat = sim_.lattice_config().lattice();
            e.at = lat.wrap(e.at);
            e.to = lat.wrap(e.to);
            std::string err = sim_.apply_food_event(e);
            if (!err.empty()) return error_reply(id, err);
            log_.food(e);
        } else if (cmd == "set_param") {
            std::string name = c.at("name").get<std::string>();
            double value = c.at("value").get<double>();
            std::string err = sim_.set_param(name, value);
            if (!err.empty()) return error_reply(id, err);
            log_.param(t, name, value);
        } else if (cmd == "pause" || cmd == "resume") {
            paused_ = cmd == "pause";
            log_.control(t, cmd);
        } else if (cmd == "step") {
            long long k = c.value("k", 1LL);
            if (k < 1) return error_reply(id, "k must be positive");
            step_credit_ += k;
            log_.control(t, "step " + std::to_string(k));
        } else if (cmd == "set_speed") {
            double v = c.at("steps_per_sec").get<double>();
            if (!(v > 0) || !std::isfinite(v)) return error_reply(id, "steps_per_sec must be positive");
            speed_ = v;
            log_.control(t, "set_speed");
        } else {
            return error_reply(id, "unknown command: " + cmd);
        }
    } catch (const std::exception& e) {
        return error_reply(id, std::string("malformed command: ") + e.what());
    }
    return json{{"type", "ack"}, {"version", kFormatVersion}, {"id", id}, {"cmd", cmd}, {"step", t}};
}

void Session::publish(bool force) {
    if (subs_.empty()) return;
    const long long t = sim_.steps_done();
    if (!force && t == last_frame_step_) return;
    last_frame_step_ = t;
    std::string delta = frame_message(tracker_.next(sim_));
    std::string full;
    for (auto& s : subs_) {
        bool fresh;
        {
            std::lock_guard lock(s->mu_);
            fresh = s->needs_snapshot_;
            s->needs_snapshot_ = false;
        }
        if (fresh) {
            if (full.empty()) full = frame_message(snapshot_json(sim_));
            s->push(full);
        } else {
            s->push(delta);
        }
    }
}

long long Session::tick(long long budget) {
    std::vector<Pending> batch;
    std::unique_lock lock(mu_);
    while (!pending_.empty()) {
        batch.push_back(std::move(pending_.front()));
        pending_.pop_front();
    }
    bool changed = false;
    for (auto& p : batch) {
        json reply = apply(p.command);
        changed = changed || reply["type"] == "ack";
        p.reply.set_value(std::move(reply));
    }
    if (changed) publish(true);

    long long n = budget;
    if (paused_) n = std::min(n, step_credit_);
    const RunConfig& cfg = sim_.config();
    if (cfg.max_steps > 0) n = std::min(n, cfg.max_steps - sim_.steps_done());
    n = std::max(0LL, n);
    const long long cadence = cfg.effective_cadence();
    const long long every = cfg.effective_check_every();
    for (long long i = 0; i < n; ++i) {
        sim_.step();
        if (sim_.steps_done() % every == 0) log_.check(sim_.steps_done(), sim_.digest());
        if (sim_.steps_done() % cadence == 0) publish(false);
    }
    if (paused_) step_credit_ -= n;
    if (n > 0 && paused_) publish(false);
    return n;
}

void Session::run_worker() {
    using clock = std::chrono::steady_clock;
    constexpr auto kTick = std::chrono::milliseconds(10);
    double carry = 0;
    auto last = clock::now();
    while (true) {
        {
            std::unique_lock lock(mu_);
            wake_.wait_for(lock, kTick, [&] { return stopping_ || !pending_.empty(); });
            if (stopping_) break;
        }
        auto now = clock::now();
        double dt = std::chrono::duration<double>(now - last).count();
        last = now;
        long long budget;
        {
            std::lock_guard lock(mu_);
            if (paused_) {
                budget = step_credit_;
                carry = 0;
            } else {
                carry += speed_ * dt;
                budget = static_cast<long long>(carry);
                carry -= static_cast<double>(budget);
            }
        }
        tick(budget);
    }
}

void Session::stop() {
    std::vector<std::shared_ptr<Subscriber>> subs;
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
        subs = subs_;
    }
    wake_.notify_all();
    for (auto& s : subs) s->close();
}

std::shared_ptr<Subscriber> Session::subscribe() {
    auto s = std::make_shared<Subscriber>();
    std::lock_guard lock(mu_);
    // Deltas are shared; with nobody else listening, restart them from now.
    if (subs_.empty()) {
        tracker_.reset();
        tracker_.next(sim_);
        last_frame_step_ = sim_.steps_done();
    }
    subs_.push_back(s);
    // Immediate full frame so the subscriber does not wait for the cadence.
    s->needs_snapshot_ = false;
    s->push(frame_message(snapshot_json(sim_)));
    return s;
}

void Session::unsubscribe(const std::shared_ptr<Subscriber>& s) {
    s->close();
    std::lock_guard lock(mu_);
    std::erase(subs_, s);
}

json Session::snapshot() const {
    std::lock_guard lock(mu_);
    return snapshot_json(sim_);
}

std::string Session::log_text() const {
    std::lock_guard lock(mu_);
    EventLog copy = log_;
    copy.finish(sim_.steps_done(), sim_.digest());
    return copy.text();
}

long long Session::steps() const {
    std::lock_guard lock(mu_);
    return sim_.steps_done();
}

bool Session::paused() const {
    std::lock_guard lock(mu_);
    return paused_;
}

ServeOptions serve_options_from_env() {
    ServeOptions o;
    const char* bind = std::getenv("FORAGE_BIND");
    if (!bind || !*bind) return o;
    std::string s(bind);
    auto colon = s.rfind(':');
    if (colon == std::string::npos) {
        o.host = s;
        return o;
    }
    o.host = s.substr(0, colon);
    o.port = std::stoi(s.substr(colon + 1));
    if (o.port < 0 || o.port > 65535) throw std::invalid_argument("FORAGE_BIND port out of range");
    return o;
}

struct HttpService::Impl {
    explicit Impl(Session& s) : session(s) {}
    Session& session;
    httplib::Server server;
};

HttpService::HttpService(Session& session) : impl_(std::make_unique<Impl>(session)) {
    auto& svr = impl_->server;
    Session* sess = &session;
    svr.Get("/stream", [sess](const httplib::Request&, httplib::Response& res) {
        auto sub = sess->subscribe();
        res.set_chunked_content_provider(
            "application/octet-stream",
            [sub](std::size_t, httplib::DataSink& sink) {
                std::string msg;
                while (!sub->closed()) {
                    if (sub->pop(msg, std::chrono::milliseconds(200))) return sink.write(msg.data(), msg.size());
                    if (!sink.is_writable()) return false;
                }
                sink.done();
                return true;
            },
            [sess, sub](bool) { sess->unsubscribe(sub); });
    });
    svr.Post("/command", [sess](const httplib::Request& req, httplib::Response& res) {
        std::vector<json> commands;
        try {
            std::string body = req.body;
            if (!body.empty() && std::isdigit(static_cast<unsigned char>(body.front()))) {
                commands = take_messages(body);
                if (!body.empty()) throw std::invalid_argument("trailing partial frame");
            } else {
                commands.push_back(json::parse(body));
            }
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(frame_message(error_reply(nullptr, std::string("bad request: ") + e.what())),
                            "application/octet-stream");
            return;
        }
        std::string out;
        for (const auto& c : commands) {
            auto fut = sess->submit(c);
            if (fut.wait_for(std::chrono::seconds(10)) != std::future_status::ready) {
                res.status = 503;
                out += frame_message(error_reply(c.is_object() && c.contains("id") ? c["id"] : json(nullptr),
                                                 "worker not running"));
                continue;
            }
            out += frame_message(fut.get());
        }
        res.set_content(out, "application/octet-stream");
    });
    svr.Get("/snapshot", [sess](const httplib::Request&, httplib::Response& res) {
        res.set_content(frame_message(sess->snapshot()), "application/octet-stream");
    });
    svr.Get("/log", [sess](const httplib::Request&, httplib::Response& res) {
        res.set_content(sess->log_text(), "text/plain");
    });
}

HttpService::~HttpService() = default;

bool HttpService::listen(const ServeOptions& opts) { return impl_->server.listen(opts.host, opts.port); }

int HttpService::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

}  // namespace forage
