#include "swiim/service.hpp"

#include "swiim/codecs.hpp"
#include "swiim/error.hpp"
#include "swiim/replay.hpp"
#include "swiim/session.hpp"
#include "swiim/wire.hpp"

#include <httplib.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>

namespace swiim {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr const char* kJson = "application/json";

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptFile:
    case ErrorCode::FormatMismatch:
        return 400;
    case ErrorCode::NothingToUndo:
    case ErrorCode::NothingToRedo:
        return 409;
    case ErrorCode::IoError:
    case ErrorCode::EncodeError:
        return 500;
    default:
        return 422;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, {{"code", code}, {"message", message}});
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, status_for(e.code()), to_json(e)); }

std::span<const std::uint8_t> as_bytes(const std::string& s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// A required multipart part, or an error response.
const httplib::MultipartFormData* part(const httplib::Request& req, httplib::Response& res,
                                       const std::string& name) {
    const auto it = req.files.find(name);
    if (it == req.files.end()) {
        send_error(res, 400, "BadRequest", "missing multipart part \"" + name + "\"");
        return nullptr;
    }
    return &it->second;
}

Raster decode_part(const httplib::MultipartFormData& p) { return import_image(as_bytes(p.content)).raster; }

struct Slot {
    std::mutex mutex;
    Session session;
    Clock::time_point last_used;

    explicit Slot(Session s) : session(std::move(s)), last_used(Clock::now()) {}
};

json resource(const Session& s) {
    return {{"id", s.id()},
            {"source", s.source_name()},
            {"source_hash", s.source_hash().hex()},
            {"width", s.current().width()},
            {"height", s.current().height()},
            {"current_hash", s.current_hash().hex()},
            {"journal", serialize(s.journal())},
            {"entries", s.journal().size()},
            {"history_length", s.history_length()},
            {"undo_depth", s.undo_depth()},
            {"can_undo", s.history().can_undo()},
            {"can_redo", s.history().can_redo()}};
}

json resource_with_line(const Session& s) {
    json out = resource(s);
    out["appended"] = serialize_entry(s.journal().back());
    return out;
}

std::string default_export_name(const Session& s, ImageFormat format) {
    std::string stem = s.source_name();
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
    if (stem.empty()) stem = "export";
    return stem + "-edited." + std::string(to_string(format));
}

std::size_t parse_size(const char* text, const char* name) {
    std::size_t used = 0;
    const std::string s(text);
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.empty() || s[0] == '-') {
        throw std::invalid_argument(std::string(name) + ": not a non-negative integer: " + s);
    }
    return static_cast<std::size_t>(v);
}

} // namespace

ServiceConfig config_from_env(ServiceConfig base) {
    if (const char* bind = std::getenv("SWIIM_BIND"); bind && *bind) {
        // host, host:port, [v6] or [v6]:port
        const std::string b(bind);
        const auto bracket = b.rfind(']');
        const auto colon = b.rfind(':');
        const bool has_port = colon != std::string::npos &&
                              (bracket != std::string::npos ? colon > bracket : b.find(':') == colon);
        std::string host = has_port ? b.substr(0, colon) : b;
        if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
        base.host = host;
        if (has_port) {
            const std::size_t port = parse_size(b.substr(colon + 1).c_str(), "SWIIM_BIND port");
            if (port > 65535) throw std::invalid_argument("SWIIM_BIND: port out of range");
            base.port = static_cast<int>(port);
        }
    }
    if (const char* cap = std::getenv("SWIIM_MAX_UPLOAD"); cap && *cap) {
        base.max_upload = parse_size(cap, "SWIIM_MAX_UPLOAD");
    }
    if (const char* ttl = std::getenv("SWIIM_TTL"); ttl && *ttl) {
        base.ttl = std::chrono::seconds(parse_size(ttl, "SWIIM_TTL"));
    }
    return base;
}

struct Service::Impl {
    ServiceConfig config;
    httplib::Server server;
    mutable std::mutex registry_mutex;
    std::map<std::string, std::shared_ptr<Slot>> sessions;

    explicit Impl(ServiceConfig c) : config(std::move(c)) {
        server.set_payload_max_length(config.max_upload);
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
            expire(Clock::now());
            return httplib::Server::HandlerResponse::Unhandled;
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send_error(res, 500, "InternalError", e.what());
            } catch (...) {
                send_error(res, 500, "InternalError", "unknown failure");
            }
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            if (res.status == 413) send_error(res, 413, "PayloadTooLarge", "request body exceeds the upload cap");
            else if (res.status == 404) send_error(res, 404, "NotFound", "no such resource");
            else send_error(res, res.status, "HttpError", httplib::status_message(res.status));
            return httplib::Server::HandlerResponse::Handled;
        });
        routes();
    }

    std::size_t expire(Clock::time_point now) {
        std::lock_guard lock(registry_mutex);
        std::size_t dropped = 0;
        for (auto it = sessions.begin(); it != sessions.end();) {
            // try_lock: a session mid-request is in use, not idle.
            std::unique_lock slot_lock(it->second->mutex, std::try_to_lock);
            if (slot_lock.owns_lock() && now - it->second->last_used > config.ttl) {
                slot_lock.unlock();
                it = sessions.erase(it);
                ++dropped;
            } else {
                ++it;
            }
        }
        return dropped;
    }

    std::shared_ptr<Slot> find(const std::string& id) {
        std::lock_guard lock(registry_mutex);
        const auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    // Runs fn(session) under the session's lock; 404 if unknown.
    template <typename Fn>
    void with_session(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        const std::string& id = req.path_params.at("id");
        auto slot = find(id);
        if (!slot) {
            send_error(res, 404, "NotFound", "no session " + id);
            return;
        }
        std::lock_guard lock(slot->mutex);
        slot->last_used = Clock::now();
        try {
            fn(slot->session);
        } catch (const Error& e) {
            send_error(res, e);
        }
    }

    void routes() {
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            const auto* image = part(req, res, "image");
            if (!image) return;
            std::string name = req.has_file("name") ? req.get_file_value("name").content : image->filename;
            if (name.empty()) name = "upload";
            try {
                auto slot = std::make_shared<Slot>(Session::open(decode_part(*image), name));
                json body = resource(slot->session);
                {
                    std::lock_guard lock(registry_mutex);
                    sessions.emplace(slot->session.id(), slot);
                }
                send_json(res, 201, body);
            } catch (const Error& e) {
                send_error(res, e);
            }
        });

        server.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) { send_json(res, 200, resource(s)); });
        });

        server.Post("/sessions/:id/ops", [this](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error& e) {
                send_error(res, 400, "BadRequest", std::string("invalid JSON: ") + e.what());
                return;
            }
            with_session(req, res, [&](Session& s) {
                s.apply(action_from_json(body));
                send_json(res, 200, resource_with_line(s));
            });
        });

        server.Post("/sessions/:id/undo", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                s.undo();
                send_json(res, 200, resource_with_line(s));
            });
        });

        server.Post("/sessions/:id/redo", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                s.redo();
                send_json(res, 200, resource_with_line(s));
            });
        });

        server.Get("/sessions/:id/journal", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](Session& s) {
                res.status = 200;
                res.set_content(serialize(s.journal()), "text/plain; charset=utf-8");
            });
        });

        server.Get("/sessions/:id/image", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::size_t> state;
            if (req.has_param("state")) {
                const std::string text = req.get_param_value("state");
                if (text.empty() || text.size() > 18 ||
                    text.find_first_not_of("0123456789") != std::string::npos) {
                    send_error(res, 400, "BadRequest", "state must be a non-negative integer");
                    return;
                }
                state = std::stoull(text);
            }
            with_session(req, res, [&](Session& s) {
                std::vector<std::uint8_t> png;
                if (state) png = export_image(step(s.journal(), s.source(), *state, s.assets()), ImageFormat::Png);
                else png = export_image(s.current(), ImageFormat::Png);
                res.status = 200;
                res.set_content(std::string(png.begin(), png.end()), "image/png");
            });
        });

        server.Post("/sessions/:id/export", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::object();
            if (!req.body.empty()) {
                try {
                    body = json::parse(req.body);
                } catch (const json::parse_error& e) {
                    send_error(res, 400, "BadRequest", std::string("invalid JSON: ") + e.what());
                    return;
                }
            }
            if (!body.is_object()) {
                send_error(res, 400, "BadRequest", "request body must be a JSON object");
                return;
            }
            with_session(req, res, [&](Session& s) {
                ImageFormat format = ImageFormat::Png;
                if (const auto f = body.find("format"); f != body.end()) {
                    const auto parsed = f->is_string() ? format_from_user_text(f->get<std::string>()) : std::nullopt;
                    if (!parsed) throw Error(ErrorCode::UnsupportedFormat, "unknown export format");
                    format = *parsed;
                }
                int quality = kDefaultJpegQuality;
                if (const auto q = body.find("quality"); q != body.end()) {
                    if (!q->is_number_integer()) throw Error(ErrorCode::ParamOutOfRange, "quality must be an integer");
                    const auto v = q->get<std::int64_t>();
                    if (v < 1 || v > 100) throw Error(ErrorCode::ParamOutOfRange, "quality must be in 1..100");
                    quality = static_cast<int>(v);
                }
                std::string file = default_export_name(s, format);
                if (const auto f = body.find("file"); f != body.end()) {
                    if (!f->is_string() || f->get<std::string>().empty())
                        throw Error(ErrorCode::SchemaError, "file must be a non-empty string");
                    file = f->get<std::string>();
                }
                const auto bytes = s.export_image(file, format, quality);
                json out = resource_with_line(s);
                out["file"] = file;
                out["format"] = to_string(format);
                out["mime"] = mime_type(format);
                out["data"] = base64_encode(bytes);
                send_json(res, 200, out);
            });
        });

        server.Post("/sessions/:id/assets", [this](const httplib::Request& req, httplib::Response& res) {
            const auto* image = part(req, res, "image");
            if (!image) return;
            with_session(req, res, [&](Session& s) {
                Raster insert = decode_part(*image);
                const json body = {{"width", insert.width()}, {"height", insert.height()},
                                   {"file", image->filename}};
                const ContentHash hash = s.add_asset(std::move(insert));
                json out = body;
                out["hash"] = hash.hex();
                send_json(res, 201, out);
            });
        });

        server.Post("/verify", [](const httplib::Request& req, httplib::Response& res) {
            const auto* source = part(req, res, "source");
            if (!source) return;
            const auto* journal_part = part(req, res, "journal");
            if (!journal_part) return;
            const auto* claimed = part(req, res, "claimed");
            if (!claimed) return;
            try {
                const Journal journal = parse_journal(journal_part->content);
                AssetStore assets;
                for (const auto& a : req.get_file_values("asset")) assets.add(decode_part(a));
                const VerifyResult result = verify(journal, decode_part(*source), decode_part(*claimed), assets);
                send_json(res, 200, to_json(result));
            } catch (const Error& e) {
                send_error(res, e);
            }
        });
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind() {
    if (impl_->config.port == 0) return impl_->server.bind_to_any_port(impl_->config.host);
    return impl_->server.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::size_t Service::session_count() const {
    std::lock_guard lock(impl_->registry_mutex);
    return impl_->sessions.size();
}

std::size_t Service::expire_idle(Clock::time_point now) { return impl_->expire(now); }

} // namespace swiim
