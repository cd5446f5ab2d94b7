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

#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "parity_meter/errors.hpp"

namespace parity::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["tool"] = "parity_meter";
  doc["version"] = PARITY_METER_VERSION;
  doc["command"] = command;
  doc["config"] = config;
  doc["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json();
  auto list = [](const std::vector<FileDigest>& files, const char* key) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : files) arr.push_back({{key, f.name}, {"sha256", f.sha256}});
    return arr;
  };
  doc["inputs"] = list(inputs, "path");
  doc["outputs"] = list(outputs, "file");
  return doc;
}

RunManifest RunManifest::from_json(const nlohmann::json& doc) {
  try {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.config = doc.at("config");
    if (doc.contains("seed") && !doc.at("seed").is_null()) {
      m.seed = doc.at("seed").get<std::uint64_t>();
    }
    for (const auto& f : doc.at("inputs")) {
      m.inputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    }
    for (const auto& f : doc.at("outputs")) {
      m.outputs.push_back({f.at("file").get<std::string>(), f.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid manifest: ") + e.what());
  }
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

void OutputSet::write(const std::string& name, const std::string& content) {
  write_text_file(dir_ / name, content);
  files_.push_back({name, sha256_hex(content)});
}

}  // namespace parity::cli
