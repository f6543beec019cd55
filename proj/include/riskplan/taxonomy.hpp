#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskplan/raster.hpp"

namespace riskplan {

using ClassId = std::uint8_t;

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  Rgb color;
  double cost = 1.0;
  bool navigable = false;
};

/// Semantic class table: names, display colors, navigability and the
/// per-class traversal cost C(l).
class ClassTaxonomy {
 public:
  /// Throws ValidationError unless ids are exactly 0..K-1 in order, names
  /// are unique and every cost is finite and positive.
  explicit ClassTaxonomy(std::vector<ClassInfo> classes);

  /// Eleven-class aerial city taxonomy. Roads and road markers are
  /// navigable with cost 1, everything else costs 10.
  static ClassTaxonomy Default();

  int size() const { return static_cast<int>(classes_.size()); }
  const std::vector<ClassInfo>& classes() const { return classes_; }
  const ClassInfo& info(ClassId id) const { return classes_.at(id); }
  bool contains(int id) const { return id >= 0 && id < size(); }

  double cost(ClassId id) const { return classes_.at(id).cost; }
  bool navigable(ClassId id) const { return classes_.at(id).navigable; }
  double min_cost() const { return min_cost_; }
  double max_cost() const { return max_cost_; }

  std::optional<ClassId> find(std::string_view name) const;
  /// Like find() but throws ValidationError for unknown names.
  ClassId require(std::string_view name) const;

  std::vector<ClassId> navigable_ids() const;

  friend bool operator==(const ClassTaxonomy& a, const ClassTaxonomy& b);

 private:
  std::vector<ClassInfo> classes_;
  double min_cost_ = 0.0;
  double max_cost_ = 0.0;
};

}  // namespace riskplan
