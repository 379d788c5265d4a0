// Copyright 2026 The zsc-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZSC_LAB_UTIL_H_
#define ZSC_LAB_UTIL_H_

#include <cstdint>
#include <functional>
#include <string>

namespace zsc_lab {

// Runs fn(0..n-1) across up to `jobs` threads. Tasks write into
// pre-allocated, index-addressed slots, so results are identical at every
// parallelism level. The first exception thrown by any task is rethrown.
void ParallelFor(int jobs, int64_t n, const std::function<void(int64_t)>& fn);

// Decimal with 6 significant digits, the format every CSV in this project
// uses ("%.6g" is locale-independent and stable across platforms).
std::string FormatSig6(double value);

// "%.3f", used for figure captions.
std::string FormatFixed3(double value);

std::string ReadFile(const std::string& path);

// Write-temp-then-rename so readers never observe a partial file.
void AtomicWriteFile(const std::string& path, const std::string& content);

void EnsureDir(const std::string& path);

}  // namespace zsc_lab

#endif  // ZSC_LAB_UTIL_H_
