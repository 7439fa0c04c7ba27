#pragma once

#include "simsr/mdp.hpp"
#include "simsr/rng.hpp"
#include "simsr/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace simsr {

// Task-irrelevant observation channel: absent, per-episode noise, or a
// time-indexed scrolling stripe pattern (the natural-video stand-in).
enum class DistractorMode { none, static_noise, scrolling };

const char* to_string(DistractorMode mode);
DistractorMode distractor_mode_from_string(const std::string& name);

struct GridSpec {
    int height = 3;
    int width = 3;
    int goal_row = 2;
    int goal_col = 2;
    double gamma = 0.99;
    double reward_scale = 1.0;
    int horizon = 100;
    DistractorMode distractor = DistractorMode::none;
    int scroll_period = 10;
};

// Renders a state index as a bright pixel on a height x width image, with
// the distractor channel (same size) appended when enabled. The clean
// channel is one-hot, so it uniquely identifies the state by construction.
class ObservationEmitter {
  public:
    ObservationEmitter(int height, int width, DistractorMode mode, std::uint64_t distractor_seed,
                       int scroll_period);

    int clean_dim() const { return height_ * width_; }
    int obs_dim() const;
    int n_phases() const;  // distinct distractor frames under scrolling (1 otherwise)
    DistractorMode mode() const { return mode_; }

    // Distractor content is a pure function of (t, episode), never of the
    // state, which is the formal sense in which it is task-irrelevant.
    Vector emit(int state, long t, long episode) const;

    // Inverse of the clean channel; throws ValidationError if no pixel
    // exceeds the detection threshold.
    int state_of(const Vector& obs) const;

  private:
    int height_;
    int width_;
    DistractorMode mode_;
    std::uint64_t seed_;
    int scroll_period_;
};

struct Transition {
    Vector obs;
    int action = 0;
    double reward = 0.0;
    Vector next_obs;
    bool done = false;  // time-limit truncation, not environment termination
};

// H x W grid, 4 deterministic actions (up, down, left, right), off-grid
// moves self-loop, reward reward_scale at the goal cell for any action.
// Episodes start at (0, 0) and truncate at the horizon.
class GridWorldEnv {
  public:
    GridWorldEnv(const GridSpec& spec, std::uint64_t seed);

    const GridSpec& spec() const { return spec_; }
    const FiniteMDP& underlying() const { return mdp_; }
    const ObservationEmitter& emitter() const { return emitter_; }
    int n_states() const { return mdp_.n_states; }
    int n_actions() const { return mdp_.n_actions; }
    int obs_dim() const { return emitter_.obs_dim(); }
    int state() const { return state_; }
    long steps_in_episode() const { return t_; }
    long episode() const { return episode_; }
    Vector current_obs() const { return emitter_.emit(state_, t_, episode_); }

    Vector reset();
    Transition step(int action);

  private:
    GridSpec spec_;
    FiniteMDP mdp_;  // rewards carry reward_scale, so metric oracles match
    ObservationEmitter emitter_;
    Rng rng_;
    int state_ = 0;
    long t_ = 0;
    long episode_ = -1;
};

// Exact MDP underlying an env plus the observation -> state inverse,
// enabling comparison of learned distances against exact fixed points.
struct GroundTruthBundle {
    FiniteMDP mdp;
    ObservationEmitter emitter;
    std::function<int(const Vector&)> state_of;
};

GroundTruthBundle ground_truth_bundle(const GridWorldEnv& env);

struct Batch {
    Matrix obs;       // n x obs_dim
    Matrix actions;   // n x n_actions, one-hot
    Vector rewards;   // n
    Matrix next_obs;  // n x obs_dim
    std::vector<std::uint8_t> done;
    std::vector<int> action_idx;
    int size() const { return static_cast<int>(rewards.size()); }
};

// Ring buffer with FIFO eviction and seeded uniform-with-replacement
// sampling.
class ReplayBuffer {
  public:
    ReplayBuffer(std::size_t capacity, int n_actions, std::uint64_t seed);

    void push(const Transition& t);
    Batch sample(int n);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

  private:
    std::size_t capacity_;
    int n_actions_;
    std::vector<Transition> storage_;
    std::size_t next_ = 0;
    Rng rng_;
};

}  // namespace simsr
