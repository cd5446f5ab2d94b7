// Copyright 2026 The parity-meter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Run manifests: what was run, with which resolved configuration, on which
// inputs, producing which outputs. No timestamps or absolute output paths, so
// two identical runs produce identical manifests.

#ifndef PARITY_METER_TOOLS_MANIFEST_HPP_
#define PARITY_METER_TOOLS_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace parity::cli {

std::string sha256_hex(const std::string& bytes);
// SchemaError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string name;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  std::optional<std::uint64_t> seed;
  std::vector<FileDigest> inputs;   // paths as given on the command line
  std::vector<FileDigest> outputs;  // file names only

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
};

// Collects output files under one directory and records their digests.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  const std::vector<FileDigest>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<FileDigest> files_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace parity::cli

#endif  // PARITY_METER_TOOLS_MANIFEST_HPP_
