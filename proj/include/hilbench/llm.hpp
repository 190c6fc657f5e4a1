#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hilbench/error.hpp"

namespace hilbench {

struct PromptTemplate {
    std::string text;
    std::set<std::string> required;  // placeholders that must be rendered

    void validate() const;  // every required placeholder occurs in text
};

// Substitutes {name} placeholders. Every placeholder in the template must be
// covered by params and every param must be used; both directions are strict.
std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& params);

enum class Role { User, Assistant };

struct Message {
    Role role = Role::User;
    std::string text;
};

// Stable digest of the canonicalized message list (roles plus trimmed text);
// keys replay fixture files.
std::string message_digest(const std::vector<Message>& messages);

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string model_name() const = 0;
    virtual std::string complete(const std::vector<Message>& messages) = 0;
    // Request settings as JSON for trial records. Never includes credentials;
    // those stay in the named environment variable.
    virtual std::string settings_summary() const { return "{}"; }
};

// Serves canned responses from <digest>.txt files; never touches the network.
class ReplayProvider : public Provider {
public:
    ReplayProvider(std::filesystem::path dir, std::string model_name = "replay");

    std::string model_name() const override { return model_name_; }
    std::string complete(const std::vector<Message>& messages) override;
    std::string settings_summary() const override;

    static void record(const std::filesystem::path& dir, const std::vector<Message>& messages,
                       std::string_view response_text);

private:
    std::filesystem::path dir_;
    std::string model_name_;
};

// Process-wide count of HTTP transport attempts; lets tests assert that
// replay-driven runs perform no network I/O.
std::uint64_t transport_attempt_count();

struct HttpChatOptions {
    std::string endpoint;  // base URL, optionally including the request path
    std::string model;
    std::string auth_env_var = "OPENAI_API_KEY";
    double request_timeout_s = 60.0;
    int max_retries_transport = 2;
    int backoff_base_ms = 250;
    double temperature = -1.0;  // < 0 leaves the server default in place
    double requests_per_minute = 0.0;  // 0 = unlimited
};

// One chat-completions wire shape: messages array in, first choice text out.
class HttpChatProvider : public Provider {
public:
    explicit HttpChatProvider(HttpChatOptions options);

    std::string model_name() const override { return options_.model; }
    std::string complete(const std::vector<Message>& messages) override;
    std::string settings_summary() const override;

private:
    HttpChatOptions options_;
};

struct ProviderRef {
    enum class Kind { HttpChat, Replay };
    Kind kind = Kind::Replay;
    std::string id;
    std::string model_name;
    std::string endpoint;
    std::string auth_env_var = "OPENAI_API_KEY";
    std::filesystem::path replay_dir;
    double request_timeout_s = 60.0;
    int max_retries_transport = 2;
    double temperature = -1.0;
    double requests_per_minute = 0.0;

    // What gets recorded with each trial; excludes secrets by construction
    // (credentials only ever live in the named environment variable).
    std::string settings_summary() const;
};

std::shared_ptr<Provider> make_provider(const ProviderRef& ref);

// One conversation. Roles alternate strictly, starting with the user.
class Session {
public:
    Session(std::shared_ptr<Provider> provider, std::string created_for = {});

    std::string send(const std::string& user_text);
    const std::vector<Message>& messages() const { return messages_; }
    const std::string& created_for() const { return created_for_; }

private:
    std::shared_ptr<Provider> provider_;
    std::vector<Message> messages_;
    std::string created_for_;
};

Session fresh_session(std::shared_ptr<Provider> provider, std::string created_for = {});

}  // namespace hilbench
