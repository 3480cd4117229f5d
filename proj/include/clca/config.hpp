#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clca/model.hpp"

namespace clca {

struct ValidationResult {
    std::optional<NetworkModel> model;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return model.has_value() && errors.empty(); }
};

/// Builds a fully derived model from a parsed config document. Every problem
/// found is reported; the model is only returned when there are no errors.
ValidationResult validate_config(const nlohmann::json& raw);

/// Reads and validates a config file. Parse failures are reported with the
/// line and column from the JSON reader.
ValidationResult load_config(const std::filesystem::path& path);

/// Inverse of validate_config for the primary fields.
nlohmann::json to_json(const NetworkModel& model);

}  // namespace clca
