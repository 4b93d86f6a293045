// Copyright 2026 The streamadapt Authors.
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

#ifndef STREAMADAPT_TESTS_TEST_UTIL_HPP_
#define STREAMADAPT_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace streamadapt::testing {

/// Unique scratch directory removed (recursively) on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("streamadapt-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Redirects std::cout and std::cerr into string buffers for the scope.
class CaptureOutput {
 public:
  CaptureOutput()
      : old_cout_(std::cout.rdbuf(cout_buffer_.rdbuf())),
        old_cerr_(std::cerr.rdbuf(cerr_buffer_.rdbuf())) {}
  ~CaptureOutput() {
    std::cout.rdbuf(old_cout_);
    std::cerr.rdbuf(old_cerr_);
  }
  CaptureOutput(const CaptureOutput&) = delete;
  CaptureOutput& operator=(const CaptureOutput&) = delete;

  std::string cout_text() const { return cout_buffer_.str(); }
  std::string cerr_text() const { return cerr_buffer_.str(); }

 private:
  std::ostringstream cout_buffer_;
  std::ostringstream cerr_buffer_;
  std::streambuf* old_cout_;
  std::streambuf* old_cerr_;
};

}  // namespace streamadapt::testing

#endif  // STREAMADAPT_TESTS_TEST_UTIL_HPP_
