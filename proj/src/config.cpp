#include "specshadow/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specshadow/errors.hpp"

namespace specshadow {

void Config::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw ConfigError(std::string("config: ") + name + " must be positive");
        }
    };
    positive(eps_eq, "eps_eq");
    positive(eps_root, "eps_root");
    positive(eps_flag, "eps_flag");
    positive(eps_rel, "eps_rel");
    if (!(window_anchor == window_anchor)) {
        throw ConfigError("config: window_anchor must be finite");
    }
    if (grid_resolution < 4) {
        throw ConfigError("config: grid_resolution must be at least 4");
    }
}

Config config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    Config cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        auto number = [&](double& slot) {
            if (!it.value().is_number()) {
                throw ConfigError("config: " + key + " must be a number");
            }
            slot = it.value().get<double>();
        };
        if (key == "eps_eq") {
            number(cfg.eps_eq);
        } else if (key == "eps_root") {
            number(cfg.eps_root);
        } else if (key == "eps_flag") {
            number(cfg.eps_flag);
        } else if (key == "eps_rel") {
            number(cfg.eps_rel);
        } else if (key == "window_anchor") {
            number(cfg.window_anchor);
        } else if (key == "grid_resolution") {
            if (!it.value().is_number_integer()) {
                throw ConfigError("config: grid_resolution must be an integer");
            }
            cfg.grid_resolution = it.value().get<int>();
        } else if (key == "seed") {
            if (!it.value().is_number_unsigned() && !it.value().is_number_integer()) {
                throw ConfigError("config: seed must be an integer");
            }
            cfg.seed = it.value().get<std::uint64_t>();
        } else {
            throw ConfigError("config: unknown key \"" + key + "\"");
        }
    }
    cfg.validate();
    return cfg;
}

Config config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot read file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

}  // namespace specshadow
