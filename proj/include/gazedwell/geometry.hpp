#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gazedwell {

// Screen coordinates in pixels, origin top-left. Negative values are
// legal: gaze may leave the screen.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Closed axis-aligned box.
struct BoundingBox {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  Point center() const { return {left + 0.5 * width, top + 0.5 * height}; }
  bool contains(Point p) const {
    return p.x >= left && p.x <= right() && p.y >= top && p.y <= bottom();
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

using LinkId = int;

struct Hyperlink {
  LinkId id = 1;
  BoundingBox bbox;
  std::string label;

  friend bool operator==(const Hyperlink&, const Hyperlink&) = default;
};

struct PageLayout {
  std::vector<Hyperlink> links;  // links[i].id == i + 1
  double screen_width = 1280.0;
  double screen_height = 1024.0;

  int size() const { return static_cast<int>(links.size()); }
  const Hyperlink& link(LinkId id) const { return links.at(static_cast<size_t>(id - 1)); }
  bool has_link(LinkId id) const { return id >= 1 && id <= size(); }

  friend bool operator==(const PageLayout&, const PageLayout&) = default;
};

inline constexpr double kDefaultAssignThresholdPx = 40.0;

// Throws std::invalid_argument when a box has non-positive extent, ids are not
// 1..M in order, or the screen is empty.
void validate(const BoundingBox& box);
void validate(const PageLayout& layout);

// Chebyshev distance from g to the nearest point of the closed box; zero on
// the box and inside it.
double box_distance(Point g, const BoundingBox& box);

// Nearest link within `threshold` pixels, lowest id on ties.
std::optional<LinkId> assign_gaze(Point g, const PageLayout& layout,
                                  double threshold = kDefaultAssignThresholdPx);

}  // namespace gazedwell
