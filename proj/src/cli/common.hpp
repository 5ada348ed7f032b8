#pragma once

#include <filesystem>
#include <string>

#include "prologian/cli/commands.hpp"

namespace prologian::cli {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws InputError when the file cannot be read.
std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and a rename.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Resolves the flag, then PROLOGIAN_COLOR, then whether stderr is a terminal.
bool use_color(const std::optional<ColorMode>& flag);

}  // namespace prologian::cli
