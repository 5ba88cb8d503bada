#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"

namespace newsbarrier {

/// Rendered analysis documents stored one file per key under a directory.
/// Writes go to a temporary file renamed into place, so readers never see a
/// partial document. Eviction is LRU by entry count. Concurrent misses on
/// the same key compute once; the other callers wait for that result.
class ResultCache {
public:
  explicit ResultCache(std::filesystem::path dir, std::size_t capacity = 512)
      : dir_(std::move(dir)), capacity_(std::max<std::size_t>(capacity, 1)) {
    std::filesystem::create_directories(dir_);
    // Rebuild recency from file times, oldest first.
    std::vector<std::pair<std::filesystem::file_time_type, std::string>> found;
    for (const auto &e : std::filesystem::directory_iterator(dir_)) {
      const auto name = e.path().filename().string();
      if (e.is_regular_file() && e.path().extension() == ".json")
        found.emplace_back(e.last_write_time(), e.path().stem().string());
      else if (name.find(".tmp.") != std::string::npos)
        std::filesystem::remove(e.path());
    }
    std::sort(found.begin(), found.end());
    for (const auto &[_, key] : found)
      touch(key);
    evict();
  }

  struct Result {
    std::string body;
    bool hit = false;
  };

  /// Cached bytes for `key`, or the output of `compute` after storing it.
  /// Exceptions from `compute` propagate to every waiting caller and nothing
  /// is stored.
  Result get_or_compute(const std::string &key, const std::function<std::string()> &compute) {
    std::shared_ptr<Flight> flight;
    bool leader = false;
    {
      std::unique_lock lock(mu_);
      if (auto body = read_locked(key))
        return {std::move(*body), true};
      auto it = flights_.find(key);
      if (it == flights_.end()) {
        flight = std::make_shared<Flight>();
        flights_.emplace(key, flight);
        leader = true;
      } else {
        flight = it->second;
      }
    }
    if (!leader) {
      std::unique_lock lock(flight->mu);
      flight->cv.wait(lock, [&] { return flight->done; });
      if (flight->error)
        std::rethrow_exception(flight->error);
      return {flight->body, true};
    }

    std::string body;
    std::exception_ptr error;
    try {
      body = compute();
      std::lock_guard lock(mu_);
      write_locked(key, body);
    } catch (...) {
      error = std::current_exception();
    }
    {
      std::lock_guard lock(flight->mu);
      flight->body = body;
      flight->error = error;
      flight->done = true;
    }
    flight->cv.notify_all();
    {
      std::lock_guard lock(mu_);
      flights_.erase(key);
    }
    if (error)
      std::rethrow_exception(error);
    return {std::move(body), false};
  }

  std::optional<std::string> get(const std::string &key) {
    std::lock_guard lock(mu_);
    return read_locked(key);
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return order_.size();
  }

  void clear() {
    std::lock_guard lock(mu_);
    for (const auto &key : order_)
      std::filesystem::remove(path_of(key));
    order_.clear();
    where_.clear();
  }

  const std::filesystem::path &directory() const { return dir_; }

private:
  struct Flight {
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    std::string body;
    std::exception_ptr error;
  };

  std::filesystem::path path_of(const std::string &key) const { return dir_ / (key + ".json"); }

  void touch(const std::string &key) {
    if (auto it = where_.find(key); it != where_.end())
      order_.erase(it->second);
    order_.push_back(key);
    where_[key] = std::prev(order_.end());
  }

  void evict() {
    while (order_.size() > capacity_) {
      const std::string victim = order_.front();
      order_.pop_front();
      where_.erase(victim);
      std::error_code ec;
      std::filesystem::remove(path_of(victim), ec);
    }
  }

  std::optional<std::string> read_locked(const std::string &key) {
    if (!where_.count(key))
      return std::nullopt;
    std::ifstream in(path_of(key), std::ios::binary);
    if (!in) {
      order_.erase(where_[key]);
      where_.erase(key);
      return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    touch(key);
    return ss.str();
  }

  void write_locked(const std::string &key, const std::string &body) {
    const auto tmp = dir_ / (key + ".tmp." + std::to_string(++counter_));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << body;
      if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path_of(key));
    touch(key);
    evict();
  }

  std::filesystem::path dir_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::string> order_;  // least recent first
  std::unordered_map<std::string, std::list<std::string>::iterator> where_;
  std::map<std::string, std::shared_ptr<Flight>> flights_;
  std::uint64_t counter_ = 0;
};

} // namespace newsbarrier
