#include "poa/regime.hpp"

#include <algorithm>
#include <iterator>

#include "poa/error.hpp"

namespace poa {

Regime::Regime(std::vector<std::size_t> paths) : paths_(std::move(paths)) {
  std::sort(paths_.begin(), paths_.end());
  paths_.erase(std::unique(paths_.begin(), paths_.end()), paths_.end());
}

Regime Regime::from_ids(const Game& game, const std::vector<std::string>& ids) {
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (const std::string& id : ids) idx.push_back(game.path_index(id));
  return Regime(std::move(idx));
}

Regime Regime::all(const Game& game) {
  std::vector<std::size_t> idx(game.num_paths());
  for (std::size_t p = 0; p < idx.size(); ++p) idx[p] = p;
  return Regime(std::move(idx));
}

bool Regime::contains(std::size_t p) const {
  return std::binary_search(paths_.begin(), paths_.end(), p);
}

bool Regime::subset_of(const Regime& other) const {
  return std::includes(other.paths_.begin(), other.paths_.end(), paths_.begin(),
                       paths_.end());
}

bool Regime::covers_all_ods(const Game& game) const {
  for (std::size_t h = 0; h < game.num_ods(); ++h) {
    const auto& od = game.od_paths(h);
    if (std::none_of(od.begin(), od.end(),
                     [this](std::size_t p) { return contains(p); }))
      return false;
  }
  return true;
}

Regime Regime::with(std::size_t p) const {
  std::vector<std::size_t> out = paths_;
  out.push_back(p);
  return Regime(std::move(out));
}

Regime Regime::without(std::size_t p) const {
  std::vector<std::size_t> out;
  std::copy_if(paths_.begin(), paths_.end(), std::back_inserter(out),
               [p](std::size_t q) { return q != p; });
  return Regime(std::move(out));
}

Regime Regime::united(const Regime& other) const {
  std::vector<std::size_t> out;
  std::set_union(paths_.begin(), paths_.end(), other.paths_.begin(),
                 other.paths_.end(), std::back_inserter(out));
  return Regime(std::move(out));
}

Regime Regime::intersected(const Regime& other) const {
  std::vector<std::size_t> out;
  std::set_intersection(paths_.begin(), paths_.end(), other.paths_.begin(),
                        other.paths_.end(), std::back_inserter(out));
  return Regime(std::move(out));
}

std::vector<std::string> Regime::ids(const Game& game) const {
  std::vector<std::string> out;
  out.reserve(paths_.size());
  for (std::size_t p : paths_) out.push_back(game.path_id(p));
  return out;
}

void require_covers_all_ods(const Game& game, const Regime& regime) {
  for (std::size_t h = 0; h < game.num_ods(); ++h) {
    const auto& od = game.od_paths(h);
    if (std::none_of(od.begin(), od.end(),
                     [&](std::size_t p) { return regime.contains(p); }))
      throw RegimeError("regime has no path for OD '" +
                        game.commodities()[h].id + "'");
  }
}

}  // namespace poa
