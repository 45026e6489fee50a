#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "shortcut/models.hpp"

namespace shortcut {

inline constexpr int kModelFormatVersion = 1;

// Header line followed by a JSON body. Doubles are written in shortest
// round-trip form, so a loaded model predicts bit-identically.
std::string model_to_text(const SplitModel& model);
SplitModel model_from_text(std::string_view text, const std::string& source = "<memory>");

void save_model(const SplitModel& model, const std::filesystem::path& path);
SplitModel load_model(const std::filesystem::path& path);

} // namespace shortcut
