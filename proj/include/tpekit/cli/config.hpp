#pragma once
// Run configuration: a JSON document validated against built-in defaults.
// Every key the user supplies must exist in the defaults with a compatible
// type; absent keys keep their default.

#include <filesystem>
#include <string>
#include <string_view>

#include "tpekit/io/json.hpp"

namespace tpekit::cli {

class Config {
 public:
  Config();  // defaults only

  // Throws IoError / ConfigError.
  static Config load(const std::filesystem::path& path);
  static Config from_json(const io::Json& user, std::filesystem::path base_dir = {});
  static const io::Json& defaults();

  // Override one dotted key ("print.layers"). The text is read as JSON when it
  // parses (numbers, true/false, null), otherwise as a string.
  void set(std::string_view dotted_key, std::string_view text);
  void set_json(std::string_view dotted_key, const io::Json& value);

  const io::Json& at(std::string_view dotted_key) const;
  double number(std::string_view key) const { return at(key).get<double>(); }
  int integer(std::string_view key) const { return at(key).get<int>(); }
  bool flag(std::string_view key) const { return at(key).get<bool>(); }
  std::string string(std::string_view key) const { return at(key).get<std::string>(); }

  // Relative paths in the config file are taken from the file's directory.
  std::filesystem::path path(std::string_view key) const;

  const io::Json& json() const noexcept { return root_; }

 private:
  io::Json root_;
  std::filesystem::path base_dir_;
};

}  // namespace tpekit::cli
