#pragma once

#include <span>

#include "gazedwell/intent.hpp"
#include "gazedwell/segmentation.hpp"

namespace gazedwell {

// Both stages of the gaze model; immutable once trained and shared between
// sessions.
struct GazeModel {
  SegModelParams seg = SegModelParams::defaults();
  IntentModelParams intent = IntentModelParams::fixture();
  double sample_period_ms = kSamplePeriodMs;

  friend bool operator==(const GazeModel&, const GazeModel&) = default;
};

// Segments the raw trajectory and runs target inference on the resulting
// scanpath. With no usable fixation the posterior is uniform.
IntentPosterior infer_posterior(std::span<const GazeSample> trajectory, const PageLayout& layout,
                                const GazeModel& model, int window = kInferenceWindow);

}  // namespace gazedwell
