/**
 * Copyright (c) dsaplan contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

/// \file
/// Caching pool allocator used as the dynamic baseline.
///
/// Freed blocks are kept whole in the pool and handed to the smallest later
/// request they can hold. Requests the pool cannot serve go to "physical"
/// memory, a bump region that only ever grows. With a finite capacity, a
/// failing physical request first returns every cached block to physical
/// memory and retries once before reporting out-of-memory.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>

#include "dsaplan/core.hpp"

namespace dsaplan {

class PoolAllocator {
 public:
  using Handle = std::uint64_t;

  struct Allocation {
    Handle handle = 0;
    Bytes address = 0;
  };

  explicit PoolAllocator(std::optional<Bytes> capacity = std::nullopt)
      : capacity_(capacity) {}

  Allocation allocate(Bytes size) {
    if (size == 0) throw Error(ErrorCode::ZeroSize, "pool request of 0 bytes");
    Allocation a;
    a.handle = next_handle_++;
    auto it = free_blocks_.lower_bound({size, 0});
    if (it != free_blocks_.end()) {
      auto [block_size, address] = *it;
      free_blocks_.erase(it);
      cached_bytes_ -= block_size;
      a.address = address;
      live_.emplace(a.handle, Block{address, block_size});
      live_bytes_ += block_size;
      return a;
    }
    auto address = physical_allocate(size);
    if (!address && capacity_ && !free_blocks_.empty()) {
      flush();
      address = physical_allocate(size);
    }
    if (!address)
      throw Error(ErrorCode::OutOfMemory,
                  "cannot allocate " + std::to_string(size) + " bytes");
    a.address = *address;
    live_.emplace(a.handle, Block{*address, size});
    live_bytes_ += size;
    return a;
  }

  void release(Handle handle) {
    auto it = live_.find(handle);
    if (it == live_.end()) {
      if (handle < next_handle_)
        throw Error(ErrorCode::DoubleFree,
                    "pool block " + std::to_string(handle) + " freed twice");
      throw Error(ErrorCode::UnknownId,
                  "pool block " + std::to_string(handle) + " was never allocated");
    }
    free_blocks_.emplace(it->second.size, it->second.address);
    cached_bytes_ += it->second.size;
    live_bytes_ -= it->second.size;
    live_.erase(it);
  }

  /// Returns every cached block to physical memory.
  void flush() {
    for (auto [size, address] : free_blocks_) add_hole(address, size);
    free_blocks_.clear();
    cached_bytes_ = 0;
    ++flushes_;
  }

  /// High-water mark of physical memory.
  Bytes peak() const { return peak_; }
  Bytes cursor() const { return cursor_; }
  Bytes live_bytes() const { return live_bytes_; }
  Bytes cached_bytes() const { return cached_bytes_; }
  std::size_t cached_blocks() const { return free_blocks_.size(); }
  std::size_t live_blocks() const { return live_.size(); }
  std::size_t flushes() const { return flushes_; }

  bool is_cached(Bytes address, Bytes size) const {
    return free_blocks_.count({size, address}) > 0;
  }

 private:
  struct Block {
    Bytes address;
    Bytes size;
  };

  std::optional<Bytes> physical_allocate(Bytes size) {
    for (auto it = holes_.begin(); it != holes_.end(); ++it) {
      auto [address, hole] = *it;
      if (hole < size) continue;
      holes_.erase(it);
      if (hole > size) holes_.emplace(address + size, hole - size);
      return address;
    }
    if (capacity_ && cursor_ + size > *capacity_) return std::nullopt;
    auto address = cursor_;
    cursor_ += size;
    peak_ = std::max(peak_, cursor_);
    return address;
  }

  void add_hole(Bytes address, Bytes size) {
    auto next = holes_.lower_bound(address);
    if (next != holes_.end() && address + size == next->first) {
      size += next->second;
      next = holes_.erase(next);
    }
    if (next != holes_.begin()) {
      auto prev = std::prev(next);
      if (prev->first + prev->second == address) {
        address = prev->first;
        size += prev->second;
        holes_.erase(prev);
      }
    }
    if (address + size == cursor_) {
      cursor_ = address;
      return;
    }
    holes_.emplace(address, size);
  }

  std::optional<Bytes> capacity_;
  std::multiset<std::pair<Bytes, Bytes>> free_blocks_;  // (size, address)
  std::map<Bytes, Bytes> holes_;                        // address -> size
  std::unordered_map<Handle, Block> live_;
  Handle next_handle_ = 1;
  Bytes cursor_ = 0;
  Bytes peak_ = 0;
  Bytes live_bytes_ = 0;
  Bytes cached_bytes_ = 0;
  std::size_t flushes_ = 0;
};

}  // namespace dsaplan
