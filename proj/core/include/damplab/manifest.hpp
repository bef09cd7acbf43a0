#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace damplab {

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunManifest {
  std::string kind;
  std::string config_hash;
  std::string tool_version;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<std::string> files;  // sorted, relative to the output directory
  std::vector<CheckOutcome> checks;

  bool all_pass() const noexcept;
  std::string to_json() const;
};

/// Current UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

/// Regular files directly inside dir, sorted by name.
std::vector<std::string> list_files(const std::filesystem::path& dir);

/// Fills manifest.files from the directory (manifest.json included) and writes it.
void write_manifest(const std::filesystem::path& dir, RunManifest& manifest);

/// Writes text to dir/name, replacing any existing file.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// %.17g, the shortest format that round-trips every double.
std::string csv_double(double v);

}  // namespace damplab
