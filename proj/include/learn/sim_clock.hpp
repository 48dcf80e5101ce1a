#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "learn/common.hpp"

namespace learn {

/// Time-ordered queue of pending items. Items due at the same cycle pop in
/// insertion order, which keeps runs deterministic.
template <typename T>
class Agenda {
 public:
  void schedule(Cycle at, T item) {
    heap_.push_back({at, seq_++, std::move(item)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  bool due(Cycle now) const noexcept { return !heap_.empty() && heap_.front().at <= now; }
  std::optional<Cycle> next() const noexcept {
    if (heap_.empty()) return std::nullopt;
    return heap_.front().at;
  }

  /// Precondition: !empty().
  std::pair<Cycle, T> pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Entry e = std::move(heap_.back());
    heap_.pop_back();
    return {e.at, std::move(e.item)};
  }

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

 private:
  struct Entry {
    Cycle at;
    std::uint64_t seq;
    T item;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::vector<Entry> heap_;
  std::uint64_t seq_ = 0;
};

}  // namespace learn
