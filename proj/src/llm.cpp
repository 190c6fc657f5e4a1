#include "hilbench/llm.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hilbench/detail/digest.hpp"
#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

namespace {

bool placeholder_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Collects {name} placeholders; anything not matching the identifier shape
// is literal text.
std::set<std::string> placeholders_in(std::string_view text) {
    std::set<std::string> names;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && placeholder_name_char(text[j])) ++j;
        if (j < text.size() && text[j] == '}' && j > i + 1) {
            names.emplace(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return names;
}

}  // namespace

void PromptTemplate::validate() const {
    std::set<std::string> present = placeholders_in(text);
    for (const std::string& name : required) {
        if (!present.count(name)) {
            raise(Errc::MissingPlaceholder, "template lacks required placeholder {" + name + "}");
        }
    }
}

std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& params) {
    tpl.validate();
    std::set<std::string> present = placeholders_in(tpl.text);
    for (const auto& [name, _] : params) {
        if (!present.count(name)) {
            raise(Errc::UnknownParam, "param '" + name + "' has no placeholder");
        }
    }
    for (const std::string& name : present) {
        if (!params.count(name)) {
            raise(Errc::MissingPlaceholder, "no value for placeholder {" + name + "}");
        }
    }

    std::string out;
    out.reserve(tpl.text.size());
    std::string_view text = tpl.text;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t j = i + 1;
            while (j < text.size() && placeholder_name_char(text[j])) ++j;
            if (j < text.size() && text[j] == '}' && j > i + 1) {
                out += params.at(std::string(text.substr(i + 1, j - i - 1)));
                i = j + 1;
                continue;
            }
        }
        out += text[i];
        ++i;
    }
    return out;
}

std::string message_digest(const std::vector<Message>& messages) {
    std::uint64_t h = detail::fnv1a64("chat/v1");
    for (const Message& m : messages) {
        h = detail::fnv1a64(m.role == Role::User ? "u" : "a", h);
        h = detail::fnv1a64("\x1f", h);
        h = detail::fnv1a64(detail::trim(m.text), h);
        h = detail::fnv1a64("\x1e", h);
    }
    return detail::hex16(h);
}

ReplayProvider::ReplayProvider(std::filesystem::path dir, std::string model_name)
    : dir_(std::move(dir)), model_name_(std::move(model_name)) {}

std::string ReplayProvider::complete(const std::vector<Message>& messages) {
    std::filesystem::path file = dir_ / (message_digest(messages) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        raise(Errc::ReplayMiss, "no fixture " + file.string() + " (" +
                                    std::to_string(messages.size()) + " messages deep)");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string ReplayProvider::settings_summary() const {
    nlohmann::json j{{"kind", "replay"}, {"model", model_name_}, {"dir", dir_.string()}};
    return j.dump();
}

void ReplayProvider::record(const std::filesystem::path& dir,
                            const std::vector<Message>& messages,
                            std::string_view response_text) {
    std::filesystem::create_directories(dir);
    std::filesystem::path file = dir / (message_digest(messages) + ".txt");
    std::ofstream out(file, std::ios::binary);
    out << response_text;
}

namespace {

std::atomic<std::uint64_t> g_transport_attempts{0};

// host[:port] and request path split; the path defaults to the common
// chat-completions route.
void split_endpoint(const std::string& endpoint, std::string& base, std::string& path) {
    std::size_t scheme = endpoint.find("://");
    std::size_t slash = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash == std::string::npos) {
        base = endpoint;
        path = "/v1/chat/completions";
    } else {
        base = endpoint.substr(0, slash);
        path = endpoint.substr(slash);
    }
}

class TokenBucket {
public:
    void acquire(double per_minute) {
        if (per_minute <= 0.0) return;
        using clock = std::chrono::steady_clock;
        std::unique_lock<std::mutex> lock(mutex_);
        for (;;) {
            auto now = clock::now();
            auto minute_ago = now - std::chrono::minutes(1);
            while (!stamps_.empty() && stamps_.front() < minute_ago) stamps_.pop_front();
            if (static_cast<double>(stamps_.size()) < per_minute) {
                stamps_.push_back(now);
                return;
            }
            auto wait_until = stamps_.front() + std::chrono::minutes(1);
            lock.unlock();
            std::this_thread::sleep_until(wait_until);
            lock.lock();
        }
    }

private:
    std::mutex mutex_;
    std::deque<std::chrono::steady_clock::time_point> stamps_;
};

TokenBucket g_rate_limit;

}  // namespace

std::uint64_t transport_attempt_count() {
    return g_transport_attempts.load();
}

HttpChatProvider::HttpChatProvider(HttpChatOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) raise(Errc::InvalidArgument, "endpoint is empty");
    if (options_.model.empty()) raise(Errc::InvalidArgument, "model is empty");
}

std::string HttpChatProvider::complete(const std::vector<Message>& messages) {
    const char* key = options_.auth_env_var.empty() ? nullptr
                                                    : std::getenv(options_.auth_env_var.c_str());
    if (!key || !*key) {
        raise(Errc::AuthMissing, "environment variable " + options_.auth_env_var + " is not set");
    }

    nlohmann::json body;
    body["model"] = options_.model;
    body["messages"] = nlohmann::json::array();
    for (const Message& m : messages) {
        body["messages"].push_back(
            {{"role", m.role == Role::User ? "user" : "assistant"}, {"content", m.text}});
    }
    if (options_.temperature >= 0.0) body["temperature"] = options_.temperature;
    std::string payload = body.dump();

    std::string base, path;
    split_endpoint(options_.endpoint, base, path);

    std::string last_error;
    int attempts = 1 + std::max(0, options_.max_retries_transport);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(options_.backoff_base_ms * (1 << (attempt - 1))));
        }
        g_rate_limit.acquire(options_.requests_per_minute);
        g_transport_attempts.fetch_add(1);

        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::duration<double>(options_.request_timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(options_.request_timeout_s));
        httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
        auto res = client.Post(path, headers, payload, "application/json");

        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            raise(Errc::Transport,
                  "status " + std::to_string(res->status) + ": " + res->body.substr(0, 512));
        }
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
            raise(Errc::Transport, "malformed completion response");
        }
        const auto& choice = parsed["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content")) {
            return choice["message"]["content"].get<std::string>();
        }
        if (choice.contains("text")) return choice["text"].get<std::string>();
        raise(Errc::Transport, "completion response has no message content");
    }
    raise(Errc::Transport, last_error + " after " + std::to_string(attempts) + " attempts");
}

std::string HttpChatProvider::settings_summary() const {
    nlohmann::json j{{"kind", "http_chat"},
                     {"model", options_.model},
                     {"endpoint", options_.endpoint},
                     {"auth_env_var", options_.auth_env_var},
                     {"request_timeout_s", options_.request_timeout_s},
                     {"max_retries_transport", options_.max_retries_transport}};
    if (options_.temperature >= 0.0) j["temperature"] = options_.temperature;
    if (options_.requests_per_minute > 0.0) {
        j["requests_per_minute"] = options_.requests_per_minute;
    }
    return j.dump();
}

std::string ProviderRef::settings_summary() const {
    nlohmann::json j;
    j["kind"] = kind == Kind::HttpChat ? "http_chat" : "replay";
    j["model_name"] = model_name;
    if (kind == Kind::HttpChat) {
        j["endpoint"] = endpoint;
        j["auth_env_var"] = auth_env_var;
        j["request_timeout_s"] = request_timeout_s;
        j["max_retries_transport"] = max_retries_transport;
        if (temperature >= 0.0) j["temperature"] = temperature;
    } else {
        j["replay_dir"] = replay_dir.string();
    }
    return j.dump();
}

std::shared_ptr<Provider> make_provider(const ProviderRef& ref) {
    if (ref.kind == ProviderRef::Kind::Replay) {
        return std::make_shared<ReplayProvider>(ref.replay_dir,
                                                ref.model_name.empty() ? "replay" : ref.model_name);
    }
    HttpChatOptions options;
    options.endpoint = ref.endpoint;
    options.model = ref.model_name;
    options.auth_env_var = ref.auth_env_var;
    options.request_timeout_s = ref.request_timeout_s;
    options.max_retries_transport = ref.max_retries_transport;
    options.temperature = ref.temperature;
    options.requests_per_minute = ref.requests_per_minute;
    return std::make_shared<HttpChatProvider>(std::move(options));
}

Session::Session(std::shared_ptr<Provider> provider, std::string created_for)
    : provider_(std::move(provider)), created_for_(std::move(created_for)) {
    if (!provider_) raise(Errc::InvalidArgument, "session needs a provider");
}

std::string Session::send(const std::string& user_text) {
    if (!messages_.empty() && messages_.back().role == Role::User) {
        raise(Errc::InvalidArgument, "roles must alternate; last message is already a user turn");
    }
    messages_.push_back(Message{Role::User, user_text});
    std::string reply = provider_->complete(messages_);
    messages_.push_back(Message{Role::Assistant, reply});
    return reply;
}

Session fresh_session(std::shared_ptr<Provider> provider, std::string created_for) {
    return Session(std::move(provider), std::move(created_for));
}

}  // namespace hilbench
