#include "riskplan/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace riskplan {

ClassTaxonomy::ClassTaxonomy(std::vector<ClassInfo> classes)
    : classes_(std::move(classes)) {
  if (classes_.empty()) throw ValidationError("taxonomy has no classes");
  if (classes_.size() > 256) {
    throw ValidationError("taxonomy supports at most 256 classes");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.id != i) {
      throw ValidationError("class ids must be contiguous from 0; entry " +
                            std::to_string(i) + " has id " +
                            std::to_string(c.id));
    }
    if (c.name.empty()) throw ValidationError("class names must be nonempty");
    if (!names.insert(c.name).second) {
      throw ValidationError("duplicate class name '" + c.name + "'");
    }
    if (!std::isfinite(c.cost) || c.cost <= 0.0) {
      throw ValidationError("class '" + c.name + "' must have a positive cost");
    }
  }
  auto [lo, hi] = std::minmax_element(
      classes_.begin(), classes_.end(),
      [](const ClassInfo& a, const ClassInfo& b) { return a.cost < b.cost; });
  min_cost_ = lo->cost;
  max_cost_ = hi->cost;
}

ClassTaxonomy ClassTaxonomy::Default() {
  // Flat display colors double as the palette of label PNGs.
  return ClassTaxonomy({
      {0, "background", {70, 110, 50}, 10.0, false},
      {1, "road", {90, 90, 90}, 1.0, true},
      {2, "road_marker", {240, 240, 240}, 1.0, true},
      {3, "building", {180, 80, 40}, 10.0, false},
      {4, "tree", {30, 140, 30}, 10.0, false},
      {5, "grass", {120, 190, 80}, 10.0, false},
      {6, "sidewalk", {200, 180, 150}, 10.0, false},
      {7, "vehicle", {40, 60, 200}, 10.0, false},
      {8, "pole", {220, 220, 40}, 10.0, false},
      {9, "fence", {150, 60, 150}, 10.0, false},
      {10, "water", {40, 120, 220}, 10.0, false},
  });
}

std::optional<ClassId> ClassTaxonomy::find(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

ClassId ClassTaxonomy::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw ValidationError("unknown class name '" + std::string(name) + "'");
}

std::vector<ClassId> ClassTaxonomy::navigable_ids() const {
  std::vector<ClassId> ids;
  for (const auto& c : classes_) {
    if (c.navigable) ids.push_back(c.id);
  }
  return ids;
}

bool operator==(const ClassTaxonomy& a, const ClassTaxonomy& b) {
  if (a.classes_.size() != b.classes_.size()) return false;
  for (std::size_t i = 0; i < a.classes_.size(); ++i) {
    const auto& x = a.classes_[i];
    const auto& y = b.classes_[i];
    if (x.id != y.id || x.name != y.name || !(x.color == y.color) ||
        x.cost != y.cost || x.navigable != y.navigable) {
      return false;
    }
  }
  return true;
}

}  // namespace riskplan
