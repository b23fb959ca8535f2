#pragma once

// Strict reader over a JSON object: typed lookups, and unknown keys are errors.

#include "eitfuse/errors.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace eitfuse::detail {

class JsonReader {
public:
    JsonReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        const nlohmann::json& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where(key) + "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where(key) + "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
                    throw ConfigError(where(key) + "expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where(key) + "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where(key) + "expected a string");
        }
        try {
            out = v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where(key) + e.what());
        }
    }

    template <class T>
    T require(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(where(key) + "missing");
        T out{};
        get(key, out);
        return out;
    }

    /// Marks the key as used and returns the raw value (must exist).
    const nlohmann::json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(where(key) + "missing");
        used_.insert(key);
        return j_.at(key);
    }

    JsonReader child(const std::string& key) {
        return JsonReader(raw(key), path_.empty() ? key : path_ + "." + key);
    }

    std::string child_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) throw ConfigError(where(it.key()) + "unknown key");
        }
    }

private:
    std::string where(const std::string& key = {}) const {
        std::string p = path_;
        if (!key.empty()) p = p.empty() ? key : p + "." + key;
        return p.empty() ? std::string() : p + ": ";
    }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> used_;
};

} // namespace eitfuse::detail
