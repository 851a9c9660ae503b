// Copyright 2026 The kgfuse Authors
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

#ifndef KGFUSE_DISJOINT_SET_H_
#define KGFUSE_DISJOINT_SET_H_

#include <map>
#include <utility>

namespace kgfuse {

// Union-find over arbitrary ordered keys. The smaller key of two merged sets
// becomes the representative, so the outcome does not depend on the order of
// unite() calls.
template <typename Key>
class DisjointSet {
 public:
  void add(const Key& k) { parent_.try_emplace(k, k); }

  bool contains(const Key& k) const { return parent_.contains(k); }

  // Adds `k` as a singleton when unknown.
  Key find(const Key& k) {
    auto [it, inserted] = parent_.try_emplace(k, k);
    if (inserted) return k;
    Key root = it->second;
    while (!(parent_.at(root) == root)) root = parent_.at(root);
    // Path compression.
    Key cur = k;
    while (!(cur == root)) {
      Key next = parent_.at(cur);
      parent_[cur] = root;
      cur = next;
    }
    return root;
  }

  // Returns the representative of the merged set.
  Key unite(const Key& a, const Key& b) {
    Key ra = find(a);
    Key rb = find(b);
    if (ra == rb) return ra;
    if (rb < ra) std::swap(ra, rb);
    parent_[rb] = ra;
    return ra;
  }

  const std::map<Key, Key>& parents() const { return parent_; }

 private:
  std::map<Key, Key> parent_;
};

}  // namespace kgfuse

#endif  // KGFUSE_DISJOINT_SET_H_
