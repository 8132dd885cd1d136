#pragma once

#include "restrictlab/forms.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>

namespace restrictlab {

// Form records:   {"arity": d, "degree": k, "terms": [{"coeff": "<decimal>", "exps": [..]}, ...]}
// System records: {"arity": d, "blocks": {"2": [form, ...], "3": [...]}}
IntegerForm form_from_json(const nlohmann::json& j);
nlohmann::json form_to_json(const IntegerForm& form);

GradedSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const GradedSystem& system);

// Canonical text: sorted keys, terms in exponent order, two-space indent, trailing newline.
std::string serialize_form(const IntegerForm& form);
std::string serialize_system(const GradedSystem& system);

using FormOrSystem = std::variant<IntegerForm, GradedSystem>;

// Dispatches on the presence of "blocks".
FormOrSystem parse_form_or_system(const std::string& text);
FormOrSystem load_form_or_system(const std::filesystem::path& path);

IntegerForm load_form(const std::filesystem::path& path);
GradedSystem load_system(const std::filesystem::path& path);

}  // namespace restrictlab
