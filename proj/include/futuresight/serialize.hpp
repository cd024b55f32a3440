#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace futuresight {

inline constexpr const char* kModelFormat = "futuresight-model-v1";

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const nlohmann::json& j, int indent = 0) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(indent) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Checks the container format tag and the per-model type tag.
inline void check_model_tags(const nlohmann::json& j, const std::string& expected_type,
                             const std::string& path) {
    if (!j.is_object() || j.value("format", "") != kModelFormat)
        throw std::runtime_error(path + ": missing or wrong format tag, expected " +
                                 std::string(kModelFormat));
    if (j.value("type", "") != expected_type)
        throw std::runtime_error(path + ": model type is '" + j.value("type", "") +
                                 "', expected '" + expected_type + "'");
}

}  // namespace futuresight
