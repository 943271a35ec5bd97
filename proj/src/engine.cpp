#include "gazedwell/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gazedwell {

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Back:
      return "BACK";
    case Command::Select:
      return "SELECT";
    case Command::Cancel:
      return "CANCEL";
    case Command::Forward:
      return "FORWARD";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (int i = 0; i < kNumCommands; ++i) {
    const auto c = static_cast<Command>(i);
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

std::vector<ButtonRegion> default_buttons(double screen_width, double screen_height) {
  const double bar_width = 100.0;
  const double margin = 10.0;
  const double slot = screen_height / kNumCommands;
  std::vector<ButtonRegion> out;
  for (int i = 0; i < kNumCommands; ++i) {
    out.push_back({static_cast<Command>(i),
                   {screen_width - bar_width + margin, i * slot + margin, bar_width - 2 * margin,
                    slot - 2 * margin}});
  }
  return out;
}

void validate(std::span<const ButtonRegion> buttons) {
  std::array<int, kNumCommands> seen{};
  for (const auto& b : buttons) {
    validate(b.bbox);
    ++seen[static_cast<int>(b.command)];
  }
  for (int n : seen) {
    if (n != 1) throw std::invalid_argument("need exactly one button region per command");
  }
  for (size_t i = 0; i < buttons.size(); ++i) {
    for (size_t j = i + 1; j < buttons.size(); ++j) {
      const auto& a = buttons[i].bbox;
      const auto& b = buttons[j].bbox;
      const bool apart = a.right() < b.left || b.right() < a.left || a.bottom() < b.top ||
                         b.bottom() < a.top;
      if (!apart) throw std::invalid_argument("button regions overlap");
    }
  }
}

int window_length(int n, double factor) {
  return static_cast<int>(std::ceil(factor * n - 1e-9));
}

bool WindowCounter::hit(int64_t t) {
  hits_.push_back(t);
  while (!hits_.empty() && hits_.front() <= t - window_) hits_.pop_front();
  return static_cast<int>(hits_.size()) >= needed_;
}

SelectionEngine::SelectionEngine(std::shared_ptr<const GazeModel> model, EngineConfig config)
    : model_(std::move(model)), config_(config) {
  if (!model_) throw std::invalid_argument("engine needs a model");
  validate(config_.policy);
  if (config_.button_dwell_samples < 1) throw std::invalid_argument("button dwell must be >= 1");
  const int w = window_length(config_.button_dwell_samples, config_.window_factor);
  for (auto& counter : button_windows_) counter = WindowCounter(config_.button_dwell_samples, w);
}

void SelectionEngine::set_layout(PageLayout layout, std::vector<ButtonRegion> buttons) {
  validate(layout);
  if (buttons.empty()) buttons = default_buttons(layout.screen_width, layout.screen_height);
  validate(buttons);
  layout_ = std::move(layout);
  buttons_ = std::move(buttons);
  reset();
}

void SelectionEngine::reset() {
  buffer_.clear();
  last_selected_.reset();
  enter_browsing();
}

void SelectionEngine::clear_histories() {
  for (auto& w : link_windows_) w.clear();
  for (auto& w : button_windows_) w.clear();
  button_runs_.fill(0);
}

void SelectionEngine::enter_browsing() {
  phase_ = Phase::Browsing;
  dwells_.reset();
  link_windows_.clear();
  select_activated_at_.reset();
  left_select_at_.reset();
  clear_histories();
}

std::optional<Command> SelectionEngine::button_at(Point p) const {
  for (const auto& b : buttons_) {
    if (b.bbox.contains(p)) return b.command;
  }
  return std::nullopt;
}

bool SelectionEngine::button_tracked(Command c) const {
  // Select is inert while its own selection phase is live.
  return !(phase_ == Phase::Selecting && c == Command::Select);
}

bool SelectionEngine::update_button(Command c, int64_t t, bool inside) {
  const int i = static_cast<int>(c);
  if (config_.strict_consecutive_buttons) {
    button_runs_[i] = inside ? button_runs_[i] + 1 : 0;
    return button_runs_[i] >= config_.button_dwell_samples;
  }
  return inside && button_windows_[i].hit(t);
}

DwellsAssigned SelectionEngine::begin_selection(const IntentPosterior& posterior, int64_t t) {
  if (!layout_) throw std::logic_error("no page layout");
  if (static_cast<int>(posterior.probs.size()) != layout_->size()) {
    throw std::invalid_argument("posterior size does not match the page layout");
  }
  DwellAssignment dwells =
      assign_dwells(posterior, config_.policy, config_.quantize, model_->sample_period_ms);
  enter_browsing();
  phase_ = Phase::Selecting;
  link_windows_.clear();
  for (const auto& d : dwells.links) {
    link_windows_.emplace_back(d.samples, window_length(d.samples, config_.window_factor));
  }
  dwells_ = dwells;
  select_activated_at_ = t;
  last_selected_.reset();
  return {std::move(dwells), posterior, t};
}

std::vector<EngineEvent> SelectionEngine::feed_gaze(const GazeSample& sample) {
  if (!layout_) throw std::invalid_argument("gaze sample before any page layout");
  if (last_t_ && sample.t <= *last_t_) {
    throw std::invalid_argument("gaze sample index " + std::to_string(sample.t) +
                                " does not follow " + std::to_string(*last_t_));
  }
  last_t_ = sample.t;
  buffer_.push_back(sample);

  std::vector<EngineEvent> events;
  const auto on_button = button_at(sample.point);

  if (phase_ == Phase::Selecting) {
    if (!left_select_at_ && on_button != Command::Select) left_select_at_ = sample.t;
    if (const auto link = assign_gaze(sample.point, *layout_, config_.assign_threshold_px)) {
      if (link_windows_[static_cast<size_t>(*link - 1)].hit(sample.t)) {
        const int64_t start = left_select_at_.value_or(sample.t);
        const int64_t rt = sample.t - start;
        events.emplace_back(
            LinkSelected{*link, sample.t, rt, static_cast<double>(rt) * model_->sample_period_ms});
        buffer_.clear();
        enter_browsing();
        last_selected_ = *link;
        return events;
      }
    }
  }

  for (const auto& b : buttons_) {
    if (!button_tracked(b.command)) continue;
    if (!update_button(b.command, sample.t, on_button == b.command)) continue;

    events.emplace_back(CommandActivated{b.command, sample.t});
    switch (b.command) {
      case Command::Select: {
        const IntentPosterior posterior =
            infer_posterior(buffer_, *layout_, *model_, config_.inference_window);
        events.emplace_back(begin_selection(posterior, sample.t));
        break;
      }
      case Command::Cancel:
        if (auto ev = cancel()) events.push_back(std::move(*ev));
        break;
      case Command::Back:
      case Command::Forward:
        buffer_.clear();
        last_selected_.reset();
        enter_browsing();
        break;
    }
    break;
  }
  return events;
}

std::optional<EngineEvent> SelectionEngine::cancel() {
  if (phase_ == Phase::Selecting) {
    buffer_.clear();
    enter_browsing();
    return SelectionCancelled{std::nullopt};
  }
  if (last_selected_) {
    const LinkId undone = *last_selected_;
    last_selected_.reset();
    buffer_.clear();
    clear_histories();
    return SelectionCancelled{undone};
  }
  return std::nullopt;
}

double response_time(std::span<const EngineEvent> events, std::span<const GazeSample> samples,
                     const BoundingBox& select_box, double sample_period_ms) {
  std::optional<int64_t> activated;
  std::optional<int64_t> selected;
  for (const auto& ev : events) {
    if (const auto* c = std::get_if<CommandActivated>(&ev)) {
      if (c->command == Command::Select && !selected) activated = c->t;
    } else if (const auto* s = std::get_if<LinkSelected>(&ev)) {
      if (activated && !selected) selected = s->t;
    }
  }
  if (!activated) throw std::invalid_argument("event log has no Select activation");
  if (!selected) throw std::invalid_argument("event log has no selection after Select");
  for (const auto& s : samples) {
    if (s.t <= *activated || s.t > *selected) continue;
    if (!select_box.contains(s.point)) {
      return static_cast<double>(*selected - s.t) * sample_period_ms;
    }
  }
  return 0.0;
}

}  // namespace gazedwell
