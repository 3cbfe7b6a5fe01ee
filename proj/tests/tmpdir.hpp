#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

// Self-cleaning temp directory for tests that touch the filesystem.
struct TmpDir {
  std::filesystem::path path;

  TmpDir() {
    static std::atomic<unsigned> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path = base / ("upliftkit_test_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }

  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }

  std::string join(const std::string& name) const { return (path / name).string(); }
};
