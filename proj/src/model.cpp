#include "gazedwell/model.hpp"

namespace gazedwell {

IntentPosterior infer_posterior(std::span<const GazeSample> trajectory, const PageLayout& layout,
                                const GazeModel& model, int window) {
  const Scanpath path = segment_scanpath(trajectory, model.seg, model.sample_period_ms);
  if (path.empty()) {
    IntentPosterior uniform;
    uniform.probs.assign(static_cast<size_t>(layout.size()), 1.0 / layout.size());
    return uniform;
  }
  return forward_posterior(path, layout, model.intent, window);
}

}  // namespace gazedwell
