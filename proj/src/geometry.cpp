#include "gazedwell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gazedwell {

void validate(const BoundingBox& box) {
  if (!(box.width > 0.0) || !(box.height > 0.0)) {
    throw std::invalid_argument("bounding box must have positive width and height");
  }
  if (!std::isfinite(box.left) || !std::isfinite(box.top) || !std::isfinite(box.width) ||
      !std::isfinite(box.height)) {
    throw std::invalid_argument("bounding box coordinates must be finite");
  }
}

void validate(const PageLayout& layout) {
  if (layout.links.empty()) throw std::invalid_argument("page layout has no links");
  if (!(layout.screen_width > 0.0) || !(layout.screen_height > 0.0)) {
    throw std::invalid_argument("screen dimensions must be positive");
  }
  for (size_t i = 0; i < layout.links.size(); ++i) {
    const auto& link = layout.links[i];
    if (link.id != static_cast<LinkId>(i + 1)) {
      throw std::invalid_argument("link ids must be contiguous from 1 in document order (got " +
                                  std::to_string(link.id) + " at position " +
                                  std::to_string(i + 1) + ")");
    }
    validate(link.bbox);
  }
}

double box_distance(Point g, const BoundingBox& box) {
  const double dx = std::max({box.left - g.x, 0.0, g.x - box.right()});
  const double dy = std::max({box.top - g.y, 0.0, g.y - box.bottom()});
  return std::max(dx, dy);
}

std::optional<LinkId> assign_gaze(Point g, const PageLayout& layout, double threshold) {
  std::optional<LinkId> best;
  double best_d = 0.0;
  for (const auto& link : layout.links) {
    const double d = box_distance(g, link.bbox);
    if (d <= threshold && (!best || d < best_d)) {
      best = link.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace gazedwell
