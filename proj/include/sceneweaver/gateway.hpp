#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace sceneweaver {

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transient transport failure (connection refused, 5xx); retried with
/// exponential backoff up to max_retries attempts.
struct RetryableError : GatewayError {
    using GatewayError::GatewayError;
};

enum class TransportKind { live, mock };

struct GatewayConfig {
    std::string base_url;
    std::string api_key;
    std::string model = "gpt-4o";
    double temperature = 0.2;
    int max_retries = 3;
    double timeout_seconds = 60.0;
    TransportKind transport = TransportKind::mock;
    std::string fixture_dir;  // mock transport: <template_id>/<index>.txt

    static GatewayConfig from_env();
};

struct ChatRequest {
    std::string template_id;
    std::string body;           // fully-bound prompt text
    std::string image_png;      // raw bytes; embedded as a data URL when set
};

/// One round trip to a chat-completions endpoint (or a stand-in).
class Transport {
  public:
    virtual ~Transport() = default;
    virtual std::string complete(const GatewayConfig& cfg, const ChatRequest& req) = 0;
};

/// Replays canned responses from fixture_dir/<template_id>/<index>.txt,
/// keyed by template id and a per-template monotonic call index.
class MockTransport final : public Transport {
  public:
    explicit MockTransport(std::string fixture_dir);
    std::string complete(const GatewayConfig& cfg, const ChatRequest& req) override;

  private:
    std::string dir_;
    std::map<std::string, int> call_index_;
};

/// POST {base_url}/chat/completions with retry + exponential backoff.
class LiveTransport final : public Transport {
  public:
    std::string complete(const GatewayConfig& cfg, const ChatRequest& req) override;
};

extern const std::vector<std::string> kTemplateIds;

/// Template body with {placeholder} slots; throws on unknown template id.
const std::string& prompt_template(const std::string& template_id);

/// Fills every placeholder; throws GatewayError if any slot stays unbound.
std::string bind_template(const std::string& template_id,
                          const std::map<std::string, std::string>& bindings);

class LlmGateway {
  public:
    LlmGateway(GatewayConfig cfg, std::shared_ptr<Transport> transport = nullptr);

    /// Binds the template, dispatches with retry/backoff, returns the first
    /// choice's message text.
    std::string complete(const std::string& template_id,
                         const std::map<std::string, std::string>& bindings,
                         const std::string& image_png = {});

    const GatewayConfig& config() const { return cfg_; }

    /// Test hook: replaces the sleep used between retries.
    void set_sleeper(std::function<void(double)> sleeper) { sleeper_ = std::move(sleeper); }
    const std::vector<double>& backoff_log() const { return backoffs_; }

  private:
    GatewayConfig cfg_;
    std::shared_ptr<Transport> transport_;
    std::function<void(double)> sleeper_;
    std::vector<double> backoffs_;
};

/// Extracts the first fenced code block (whole message as fallback) and
/// parses it as JSON. Throws GatewayError when nothing parses.
nlohmann::json extract_structured(const std::string& raw);

}  // namespace sceneweaver
