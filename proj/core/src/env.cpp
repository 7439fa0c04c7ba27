#include "simsr/env.hpp"

#include "simsr/errors.hpp"

#include <string>

namespace simsr {
namespace {

FiniteMDP build_grid_mdp(const GridSpec& spec) {
    if (spec.height <= 0 || spec.width <= 0) throw ValidationError("grid: size must be positive");
    if (spec.goal_row < 0 || spec.goal_row >= spec.height || spec.goal_col < 0 ||
        spec.goal_col >= spec.width)
        throw ValidationError("grid: goal cell out of bounds");
    if (spec.horizon <= 0) throw ValidationError("grid: horizon must be positive");
    if (spec.reward_scale <= 0.0) throw ValidationError("grid: reward_scale must be positive");
    if (spec.scroll_period <= 1 && spec.distractor == DistractorMode::scrolling)
        throw ValidationError("grid: scroll_period must be > 1 for a scrolling distractor");

    const int n = spec.height * spec.width;
    FiniteMDP mdp;
    mdp.n_states = n;
    mdp.n_actions = 4;
    mdp.gamma = spec.gamma;
    mdp.reward = Matrix::Zero(n, 4);
    mdp.transition.assign(4, Matrix::Zero(n, n));

    const int goal = spec.goal_row * spec.width + spec.goal_col;
    // Actions: 0 up, 1 down, 2 left, 3 right; off-grid moves self-loop.
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const int s = r * spec.width + c;
            for (int a = 0; a < 4; ++a) {
                int nr = r + dr[a];
                int nc = c + dc[a];
                if (nr < 0 || nr >= spec.height || nc < 0 || nc >= spec.width) {
                    nr = r;
                    nc = c;
                }
                mdp.transition[a](s, nr * spec.width + nc) = 1.0;
                if (s == goal) mdp.reward(s, a) = spec.reward_scale;
            }
        }
    }
    require_valid(mdp);
    return mdp;
}

}  // namespace

const char* to_string(DistractorMode mode) {
    switch (mode) {
        case DistractorMode::none: return "none";
        case DistractorMode::static_noise: return "static_noise";
        case DistractorMode::scrolling: return "scrolling";
    }
    throw Error("unknown DistractorMode");
}

DistractorMode distractor_mode_from_string(const std::string& name) {
    if (name == "none") return DistractorMode::none;
    if (name == "static_noise") return DistractorMode::static_noise;
    if (name == "scrolling") return DistractorMode::scrolling;
    throw ValidationError("unknown distractor mode '" + name +
                          "' (expected none, static_noise, or scrolling)");
}

ObservationEmitter::ObservationEmitter(int height, int width, DistractorMode mode,
                                       std::uint64_t distractor_seed, int scroll_period)
    : height_(height),
      width_(width),
      mode_(mode),
      seed_(distractor_seed),
      scroll_period_(scroll_period) {
    if (height <= 0 || width <= 0) throw ValidationError("emitter: image size must be positive");
    if (mode == DistractorMode::scrolling && scroll_period <= 1)
        throw ValidationError("emitter: scroll_period must be > 1");
}

int ObservationEmitter::obs_dim() const {
    return mode_ == DistractorMode::none ? clean_dim() : 2 * clean_dim();
}

int ObservationEmitter::n_phases() const {
    return mode_ == DistractorMode::scrolling ? scroll_period_ : 1;
}

Vector ObservationEmitter::emit(int state, long t, long episode) const {
    if (state < 0 || state >= clean_dim()) throw ValidationError("emitter: state out of range");
    Vector obs = Vector::Zero(obs_dim());
    obs(state) = 1.0;
    const int d = clean_dim();
    switch (mode_) {
        case DistractorMode::none: break;
        case DistractorMode::static_noise: {
            // Frozen per episode; identical across action sequences since it
            // depends only on the episode index.
            Rng noise(derive_seed(seed_, static_cast<std::uint64_t>(episode)));
            for (int i = 0; i < d; ++i) obs(d + i) = noise.uniform();
            break;
        }
        case DistractorMode::scrolling: {
            // Diagonal stripes advancing one pixel per step, period
            // scroll_period_; a pure function of t.
            const long phase = ((t % scroll_period_) + scroll_period_) % scroll_period_;
            for (int r = 0; r < height_; ++r)
                for (int c = 0; c < width_; ++c)
                    if ((r + c + phase) % scroll_period_ < (scroll_period_ + 1) / 2)
                        obs(d + r * width_ + c) = 1.0;
            break;
        }
    }
    return obs;
}

int ObservationEmitter::state_of(const Vector& obs) const {
    if (obs.size() < clean_dim()) throw DimensionError("emitter: observation too short");
    int best = -1;
    double best_v = 0.5;  // detection threshold; clean pixels are 0 or 1
    for (int i = 0; i < clean_dim(); ++i) {
        if (obs(i) > best_v) {
            best_v = obs(i);
            best = i;
        }
    }
    if (best < 0) throw ValidationError("emitter: no agent pixel found in observation");
    return best;
}

GridWorldEnv::GridWorldEnv(const GridSpec& spec, std::uint64_t seed)
    : spec_(spec),
      mdp_(build_grid_mdp(spec)),
      emitter_(spec.height, spec.width, spec.distractor, derive_seed(seed, 0x64697374),
               spec.scroll_period),
      rng_(derive_seed(seed, 0x656e76)) {
    reset();
}

Vector GridWorldEnv::reset() {
    state_ = 0;
    t_ = 0;
    ++episode_;
    return emitter_.emit(state_, t_, episode_);
}

Transition GridWorldEnv::step(int action) {
    if (action < 0 || action >= mdp_.n_actions)
        throw ValidationError("env: invalid action " + std::to_string(action));
    Transition tr;
    tr.obs = emitter_.emit(state_, t_, episode_);
    tr.action = action;
    tr.reward = mdp_.reward(state_, action);

    // Draw the successor from the transition row (deterministic rows still
    // consume one uniform, keeping the stream layout uniform across MDPs).
    const double u = rng_.uniform();
    double acc = 0.0;
    int next = mdp_.n_states - 1;
    for (int s = 0; s < mdp_.n_states; ++s) {
        acc += mdp_.transition[action](state_, s);
        if (u < acc) {
            next = s;
            break;
        }
    }
    state_ = next;
    ++t_;
    tr.next_obs = emitter_.emit(state_, t_, episode_);
    tr.done = t_ >= spec_.horizon;
    return tr;
}

GroundTruthBundle ground_truth_bundle(const GridWorldEnv& env) {
    GroundTruthBundle bundle{env.underlying(), env.emitter(), {}};
    const ObservationEmitter emitter = env.emitter();
    bundle.state_of = [emitter](const Vector& obs) { return emitter.state_of(obs); };
    return bundle;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int n_actions, std::uint64_t seed)
    : capacity_(capacity), n_actions_(n_actions), rng_(seed) {
    if (capacity == 0) throw ValidationError("buffer: capacity must be positive");
    if (n_actions <= 0) throw ValidationError("buffer: n_actions must be positive");
    storage_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (t.action < 0 || t.action >= n_actions_)
        throw ValidationError("buffer: transition action out of range");
    if (storage_.size() < capacity_) {
        storage_.push_back(t);
    } else {
        storage_[next_] = t;  // FIFO: overwrite the oldest slot
    }
    next_ = (next_ + 1) % capacity_;
}

Batch ReplayBuffer::sample(int n) {
    if (storage_.empty()) throw ValidationError("buffer: cannot sample from an empty buffer");
    if (n <= 0) throw ValidationError("buffer: sample size must be positive");
    const auto obs_dim = storage_.front().obs.size();
    Batch b;
    b.obs.resize(n, obs_dim);
    b.actions = Matrix::Zero(n, n_actions_);
    b.rewards.resize(n);
    b.next_obs.resize(n, obs_dim);
    b.done.resize(n);
    b.action_idx.resize(n);
    for (int i = 0; i < n; ++i) {
        const Transition& t = storage_[rng_.uniform_int(storage_.size())];
        b.obs.row(i) = t.obs.transpose();
        b.actions(i, t.action) = 1.0;
        b.rewards(i) = t.reward;
        b.next_obs.row(i) = t.next_obs.transpose();
        b.done[i] = t.done ? 1 : 0;
        b.action_idx[i] = t.action;
    }
    return b;
}

}  // namespace simsr
