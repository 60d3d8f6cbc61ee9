#pragma once

// JSON config files for CLI11. Keys are long option names without dashes.
// Nested objects address subcommands ({"reduce": {"fit": {...}}}); flat keys
// that the main app does not know are applied to the selected subcommand.

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace embcomp::cli {

class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto values = opt->as<std::vector<std::string>>();
                j[name] = values.size() == 1 ? nlohmann::json(values.front()) : nlohmann::json(values);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config", "JSON config must be an object");
        std::vector<CLI::ConfigItem> items;
        collect(j, root_, {}, items);
        return items;
    }

private:
    static std::vector<std::string> scalar_inputs(const nlohmann::json& v) {
        std::vector<std::string> out;
        if (v.is_array()) {
            for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        } else if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else {
            out.push_back(v.dump());
        }
        return out;
    }

    static std::vector<std::string> selected_path(const CLI::App* app) {
        std::vector<std::string> path;
        while (app) {
            const auto subs = app->get_subcommands();
            if (subs.empty()) break;
            app = subs.front();
            path.push_back(app->get_name());
        }
        return path;
    }

    void collect(const nlohmann::json& j, const CLI::App* app, const std::vector<std::string>& parents,
                 std::vector<CLI::ConfigItem>& items) const {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                const CLI::App* sub = nullptr;
                try {
                    sub = app->get_subcommand(key);
                } catch (const CLI::OptionNotFound&) {
                    throw CLI::ConversionError("config", "unknown config section '" + key + "'");
                }
                auto next = parents;
                next.push_back(key);
                collect(value, sub, next, items);
                continue;
            }
            CLI::ConfigItem item;
            item.name = key;
            item.inputs = scalar_inputs(value);
            item.parents = parents;
            if (parents.empty() && app->get_option_no_throw("--" + key) == nullptr) item.parents = selected_path(root_);
            items.push_back(std::move(item));
        }
    }

    const CLI::App* root_;
};

}  // namespace embcomp::cli
