// Copyright 2026 The semtag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMTAG_RUN_CONFIG_H_
#define SEMTAG_RUN_CONFIG_H_

// Flat key=value configuration files. Blank lines and lines starting with
// '#' are ignored; later keys override earlier ones.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "semtag/trainer.h"

namespace semtag {

using ConfigMap = std::map<std::string, std::string>;

// Throws Error(kInvalidConfig) naming the offending line.
ConfigMap ParseConfig(std::istream& in);
// Throws Error(kIoError) or Error(kInvalidConfig).
ConfigMap LoadConfigFile(const std::filesystem::path& path);

// Sets every training key present in `config` and returns the keys it did
// not recognise. Throws Error(kInvalidConfig) on malformed values.
ConfigMap ApplyTrainConfig(const ConfigMap& config, TrainConfig& train);

inline constexpr const char* kThreadsEnvVar = "SEMTAG_THREADS";

// Value of SEMTAG_THREADS when it holds a positive integer, otherwise 1.
int DefaultThreadCount();

}  // namespace semtag

#endif  // SEMTAG_RUN_CONFIG_H_
