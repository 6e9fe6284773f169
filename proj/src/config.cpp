#include "sceneweaver/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sceneweaver {

namespace {

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

double to_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("config: \"" + key + "\" is not a number: " + v);
    return d;
}

int to_int(const std::string& v, const std::string& key) {
    return static_cast<int>(to_double(v, key));
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_config(
    const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) {
            // keep # inside quoted values
            size_t quote_open = line.find('"');
            if (quote_open == std::string::npos || quote_open > hash) line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            sections[section];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        sections[section][key] = value;
    }
    return sections;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    cfg.apply(parse_config(ss.str()));
    return cfg;
}

void RunConfig::apply(
    const std::map<std::string, std::map<std::string, std::string>>& sections) {
    for (const auto& [section, kv] : sections) {
        for (const auto& [key, value] : kv) {
            std::string path = section + "." + key;
            if (section == "planner") {
                if (key == "max_iterations") planner.max_iterations = to_int(value, path);
                else if (key == "memory_length") planner.memory_length = to_int(value, path);
                else if (key == "stop_threshold") planner.stop_threshold = to_int(value, path);
                else if (key == "confidence_decay")
                    planner.confidence_decay = to_double(value, path);
                else if (key == "rollback_drop") planner.rollback_drop = to_double(value, path);
                else throw ConfigError("config: unknown key " + path);
            } else if (section == "optimizer") {
                if (key == "max_steps") optim.max_steps = to_int(value, path);
                else if (key == "step_damping") optim.step_damping = to_double(value, path);
                else throw ConfigError("config: unknown key " + path);
            } else if (section == "gateway") {
                if (key == "base_url") gateway.base_url = value;
                else if (key == "api_key") gateway.api_key = value;
                else if (key == "model") gateway.model = value;
                else if (key == "temperature") gateway.temperature = to_double(value, path);
                else if (key == "max_retries") gateway.max_retries = to_int(value, path);
                else if (key == "timeout") gateway.timeout_seconds = to_double(value, path);
                else if (key == "transport") {
                    if (value == "live") gateway.transport = TransportKind::live;
                    else if (value.rfind("mock:", 0) == 0) {
                        gateway.transport = TransportKind::mock;
                        gateway.fixture_dir = value.substr(5);
                    } else if (value == "mock") {
                        gateway.transport = TransportKind::mock;
                    } else {
                        throw ConfigError("config: bad transport " + value);
                    }
                } else throw ConfigError("config: unknown key " + path);
            } else if (section == "paths") {
                if (key == "catalog") catalog_path = value;
                else if (key == "library") library_dir = value;
                else if (key == "pretrained") pretrained_dir = value;
                else if (key == "out") out_dir = value;
                else throw ConfigError("config: unknown key " + path);
            } else if (section.empty() && key == "seed") {
                seed = static_cast<unsigned>(to_int(value, path));
            } else {
                throw ConfigError("config: unknown section [" + section + "]");
            }
        }
    }
}

}  // namespace sceneweaver
