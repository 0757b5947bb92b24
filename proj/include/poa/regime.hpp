#pragma once

#include <string>
#include <vector>

#include "poa/model.hpp"

namespace poa {

// A set of path indices, kept sorted and unique. A regime proper meets every
// OD pair's path set; `covers_all_ods` checks that.
class Regime {
 public:
  Regime() = default;
  explicit Regime(std::vector<std::size_t> paths);
  static Regime from_ids(const Game& game, const std::vector<std::string>& ids);
  static Regime all(const Game& game);

  const std::vector<std::size_t>& paths() const { return paths_; }
  std::size_t size() const { return paths_.size(); }
  bool empty() const { return paths_.empty(); }
  bool contains(std::size_t p) const;
  bool subset_of(const Regime& other) const;
  bool covers_all_ods(const Game& game) const;

  Regime with(std::size_t p) const;
  Regime without(std::size_t p) const;
  Regime united(const Regime& other) const;
  Regime intersected(const Regime& other) const;

  std::vector<std::string> ids(const Game& game) const;

  friend bool operator==(const Regime&, const Regime&) = default;

 private:
  std::vector<std::size_t> paths_;
};

// Throws RegimeError naming the first OD pair the regime misses.
void require_covers_all_ods(const Game& game, const Regime& regime);

}  // namespace poa
