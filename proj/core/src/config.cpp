#include "simsr/config.hpp"

#include "simsr/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace simsr {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
}

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ValidationError("config: '" + where + "' must be an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
T get_as(const json& obj, const std::string& where, const char* key, T def) {
    if (!obj.contains(key)) return def;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("config: bad value type for '" + std::string(key) + "' in " + where);
    }
}

GridSpec parse_grid(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"height", "width", "goal_row", "goal_col", "gamma", "reward_scale", "horizon",
                  "distractor", "scroll_period"});
    GridSpec g;
    g.height = get_as<int>(obj, where, "height", g.height);
    g.width = get_as<int>(obj, where, "width", g.width);
    g.goal_row = get_as<int>(obj, where, "goal_row", g.height - 1);
    g.goal_col = get_as<int>(obj, where, "goal_col", g.width - 1);
    g.gamma = get_as<double>(obj, where, "gamma", g.gamma);
    g.reward_scale = get_as<double>(obj, where, "reward_scale", g.reward_scale);
    g.horizon = get_as<int>(obj, where, "horizon", g.horizon);
    g.distractor =
        distractor_mode_from_string(get_as<std::string>(obj, where, "distractor", "none"));
    g.scroll_period = get_as<int>(obj, where, "scroll_period", g.scroll_period);
    return g;
}

ojson echo_grid(const GridSpec& g) {
    ojson o;
    o["height"] = g.height;
    o["width"] = g.width;
    o["goal_row"] = g.goal_row;
    o["goal_col"] = g.goal_col;
    o["gamma"] = g.gamma;
    o["reward_scale"] = g.reward_scale;
    o["horizon"] = g.horizon;
    o["distractor"] = to_string(g.distractor);
    o["scroll_period"] = g.scroll_period;
    return o;
}

TrainConfig parse_train_section(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"gamma", "batch_size", "learning_rate", "momentum", "loss_kind", "huber_delta",
                  "target_variant", "ensemble_k", "hidden_dim", "latent_dim"});
    TrainConfig t;
    t.gamma = get_as<double>(obj, where, "gamma", t.gamma);
    t.batch_size = get_as<int>(obj, where, "batch_size", t.batch_size);
    t.learning_rate = get_as<double>(obj, where, "learning_rate", t.learning_rate);
    t.momentum = get_as<double>(obj, where, "momentum", t.momentum);
    t.loss_kind = loss_kind_from_string(get_as<std::string>(obj, where, "loss_kind", "huber"));
    t.huber_delta = get_as<double>(obj, where, "huber_delta", t.huber_delta);
    t.target_variant = target_variant_from_string(
        get_as<std::string>(obj, where, "target_variant", "observation_sampling"));
    t.ensemble_k = get_as<int>(obj, where, "ensemble_k", t.ensemble_k);
    t.hidden_dim = get_as<int>(obj, where, "hidden_dim", t.hidden_dim);
    t.latent_dim = get_as<int>(obj, where, "latent_dim", t.latent_dim);
    t.validate();
    return t;
}

ojson echo_train_section(const TrainConfig& t) {
    ojson o;
    o["gamma"] = t.gamma;
    o["batch_size"] = t.batch_size;
    o["learning_rate"] = t.learning_rate;
    o["momentum"] = t.momentum;
    o["loss_kind"] = to_string(t.loss_kind);
    o["huber_delta"] = t.huber_delta;
    o["target_variant"] = to_string(t.target_variant);
    o["ensemble_k"] = t.ensemble_k;
    o["hidden_dim"] = t.hidden_dim;
    o["latent_dim"] = t.latent_dim;
    return o;
}

AgentConfig parse_agent_section(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"enabled", "alpha", "critic_tau", "critic_target_update_freq", "actor_lr",
                  "critic_lr", "update_encoder_from_critic"});
    AgentConfig a;
    a.enabled = get_as<bool>(obj, where, "enabled", a.enabled);
    a.alpha = get_as<double>(obj, where, "alpha", a.alpha);
    a.critic_tau = get_as<double>(obj, where, "critic_tau", a.critic_tau);
    a.critic_target_update_freq =
        get_as<int>(obj, where, "critic_target_update_freq", a.critic_target_update_freq);
    a.actor_lr = get_as<double>(obj, where, "actor_lr", a.actor_lr);
    a.critic_lr = get_as<double>(obj, where, "critic_lr", a.critic_lr);
    a.update_encoder_from_critic =
        get_as<bool>(obj, where, "update_encoder_from_critic", a.update_encoder_from_critic);
    if (a.alpha < 0.0) throw ValidationError("config: agent.alpha must be nonnegative");
    if (a.critic_tau <= 0.0 || a.critic_tau > 1.0)
        throw ValidationError("config: agent.critic_tau must be in (0, 1]");
    if (a.critic_target_update_freq <= 0)
        throw ValidationError("config: agent.critic_target_update_freq must be positive");
    if (a.actor_lr <= 0.0 || a.critic_lr <= 0.0)
        throw ValidationError("config: agent learning rates must be positive");
    return a;
}

ojson echo_agent_section(const AgentConfig& a) {
    ojson o;
    o["enabled"] = a.enabled;
    o["alpha"] = a.alpha;
    o["critic_tau"] = a.critic_tau;
    o["critic_target_update_freq"] = a.critic_target_update_freq;
    o["actor_lr"] = a.actor_lr;
    o["critic_lr"] = a.critic_lr;
    o["update_encoder_from_critic"] = a.update_encoder_from_critic;
    return o;
}

RunSection parse_run_section(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"total_steps", "init_steps", "buffer_capacity", "eval_every", "eval_episodes",
                  "checkpoint_every", "train_encoder", "train_dynamics", "behavior",
                  "freeze_encoder", "load_encoder"});
    RunSection r;
    r.total_steps = get_as<long>(obj, where, "total_steps", r.total_steps);
    r.init_steps = get_as<long>(obj, where, "init_steps", r.init_steps);
    r.buffer_capacity = get_as<long>(obj, where, "buffer_capacity", r.buffer_capacity);
    r.eval_every = get_as<long>(obj, where, "eval_every", r.eval_every);
    r.eval_episodes = get_as<int>(obj, where, "eval_episodes", r.eval_episodes);
    r.checkpoint_every = get_as<long>(obj, where, "checkpoint_every", r.checkpoint_every);
    r.train_encoder = get_as<bool>(obj, where, "train_encoder", r.train_encoder);
    r.train_dynamics = get_as<bool>(obj, where, "train_dynamics", r.train_dynamics);
    r.behavior = get_as<std::string>(obj, where, "behavior", r.behavior);
    r.freeze_encoder = get_as<bool>(obj, where, "freeze_encoder", r.freeze_encoder);
    r.load_encoder = get_as<std::string>(obj, where, "load_encoder", r.load_encoder);
    if (r.total_steps <= 0) throw ValidationError("config: run.total_steps must be positive");
    if (r.init_steps < 0 || r.init_steps >= r.total_steps)
        throw ValidationError("config: run.init_steps must be in [0, total_steps)");
    if (r.buffer_capacity <= 0)
        throw ValidationError("config: run.buffer_capacity must be positive");
    if (r.eval_every <= 0) throw ValidationError("config: run.eval_every must be positive");
    if (r.eval_episodes <= 0) throw ValidationError("config: run.eval_episodes must be positive");
    if (r.checkpoint_every < 0)
        throw ValidationError("config: run.checkpoint_every must be nonnegative");
    if (r.behavior != "agent" && r.behavior != "uniform")
        throw ValidationError("config: run.behavior must be 'agent' or 'uniform'");
    if (r.freeze_encoder && r.load_encoder.empty())
        throw ValidationError("config: run.freeze_encoder requires run.load_encoder");
    return r;
}

ojson echo_run_section(const RunSection& r) {
    ojson o;
    o["total_steps"] = r.total_steps;
    o["init_steps"] = r.init_steps;
    o["buffer_capacity"] = r.buffer_capacity;
    o["eval_every"] = r.eval_every;
    o["eval_episodes"] = r.eval_episodes;
    o["checkpoint_every"] = r.checkpoint_every;
    o["train_encoder"] = r.train_encoder;
    o["train_dynamics"] = r.train_dynamics;
    o["behavior"] = r.behavior;
    o["freeze_encoder"] = r.freeze_encoder;
    o["load_encoder"] = r.load_encoder;
    return o;
}

MdpSpecConfig parse_mdp_spec(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"kind", "grid", "n_states", "n_actions", "deterministic", "gamma_lo", "gamma_hi",
                  "path"});
    MdpSpecConfig m;
    m.kind = get_as<std::string>(obj, where, "kind", m.kind);
    if (m.kind == "grid") {
        if (obj.contains("grid")) m.grid = parse_grid(obj.at("grid"), where + ".grid");
    } else if (m.kind == "random") {
        m.n_states = get_as<int>(obj, where, "n_states", m.n_states);
        m.n_actions = get_as<int>(obj, where, "n_actions", m.n_actions);
        m.deterministic = get_as<bool>(obj, where, "deterministic", m.deterministic);
        m.gamma_lo = get_as<double>(obj, where, "gamma_lo", m.gamma_lo);
        m.gamma_hi = get_as<double>(obj, where, "gamma_hi", m.gamma_hi);
        if (m.n_states <= 0 || m.n_actions <= 0)
            throw ValidationError("config: random MDP sizes must be positive");
    } else if (m.kind == "file") {
        m.path = get_as<std::string>(obj, where, "path", m.path);
        if (m.path.empty()) throw ValidationError("config: mdp.kind 'file' requires mdp.path");
    } else {
        throw ValidationError("config: mdp.kind must be grid, random, or file (got '" + m.kind +
                              "')");
    }
    return m;
}

ojson echo_mdp_spec(const MdpSpecConfig& m) {
    ojson o;
    o["kind"] = m.kind;
    if (m.kind == "grid") {
        o["grid"] = echo_grid(m.grid);
    } else if (m.kind == "random") {
        o["n_states"] = m.n_states;
        o["n_actions"] = m.n_actions;
        o["deterministic"] = m.deterministic;
        o["gamma_lo"] = m.gamma_lo;
        o["gamma_hi"] = m.gamma_hi;
    } else {
        o["path"] = m.path;
    }
    return o;
}

void check_policy_name(const std::string& policy) {
    if (policy != "uniform" && policy != "optimal" && policy != "random")
        throw ValidationError("config: policy must be uniform, optimal, or random (got '" +
                              policy + "')");
}

}  // namespace

SolveMetricConfig parse_solve_metric_config(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "top level", {"mdp", "policy", "operator", "tol", "max_iter", "seed"});
    SolveMetricConfig c;
    if (root.contains("mdp")) c.mdp = parse_mdp_spec(root.at("mdp"), "mdp");
    c.policy = get_as<std::string>(root, "top level", "policy", c.policy);
    check_policy_name(c.policy);
    c.op = operator_kind_from_string(
        get_as<std::string>(root, "top level", "operator", "independent"));
    c.tol = get_as<double>(root, "top level", "tol", c.tol);
    c.max_iter = get_as<int>(root, "top level", "max_iter", c.max_iter);
    c.seed = get_as<std::uint64_t>(root, "top level", "seed", c.seed);
    if (c.tol <= 0.0) throw ValidationError("config: tol must be positive");
    if (c.max_iter < 0) throw ValidationError("config: max_iter must be nonnegative");
    return c;
}

TrainCommandConfig parse_train_config(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "top level", {"env", "train", "agent", "run", "seed"});
    TrainCommandConfig c;
    if (root.contains("env")) c.env = parse_grid(root.at("env"), "env");
    if (root.contains("train")) c.train = parse_train_section(root.at("train"), "train");
    if (root.contains("agent")) c.agent = parse_agent_section(root.at("agent"), "agent");
    if (root.contains("run")) c.run = parse_run_section(root.at("run"), "run");
    c.seed = get_as<std::uint64_t>(root, "top level", "seed", c.seed);
    if (c.run.behavior == "agent" && !c.agent.enabled)
        throw ValidationError("config: run.behavior 'agent' requires agent.enabled");
    return c;
}

EvalCommandConfig parse_eval_config(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "top level", {"env", "checkpoint", "policy", "operator", "tol", "seed"});
    EvalCommandConfig c;
    if (root.contains("env")) c.env = parse_grid(root.at("env"), "env");
    c.checkpoint = get_as<std::string>(root, "top level", "checkpoint", c.checkpoint);
    if (c.checkpoint.empty()) throw ValidationError("config: eval requires a checkpoint path");
    c.policy = get_as<std::string>(root, "top level", "policy", c.policy);
    check_policy_name(c.policy);
    c.op = operator_kind_from_string(
        get_as<std::string>(root, "top level", "operator", "independent"));
    c.tol = get_as<double>(root, "top level", "tol", c.tol);
    if (c.tol <= 0.0) throw ValidationError("config: tol must be positive");
    c.seed = get_as<std::uint64_t>(root, "top level", "seed", c.seed);
    return c;
}

TransferCommandConfig parse_transfer_config(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "top level",
                 {"env", "source_checkpoint", "train", "agent", "run", "seed"});
    TransferCommandConfig c;
    if (root.contains("env")) c.env = parse_grid(root.at("env"), "env");
    c.source_checkpoint =
        get_as<std::string>(root, "top level", "source_checkpoint", c.source_checkpoint);
    if (c.source_checkpoint.empty())
        throw ValidationError("config: transfer requires source_checkpoint");
    if (root.contains("train")) c.train = parse_train_section(root.at("train"), "train");
    if (root.contains("agent")) c.agent = parse_agent_section(root.at("agent"), "agent");
    if (root.contains("run")) c.run = parse_run_section(root.at("run"), "run");
    c.seed = get_as<std::uint64_t>(root, "top level", "seed", c.seed);
    return c;
}

std::string echo_config(const SolveMetricConfig& c) {
    ojson o;
    o["mdp"] = echo_mdp_spec(c.mdp);
    o["policy"] = c.policy;
    o["operator"] = to_string(c.op);
    o["tol"] = c.tol;
    o["max_iter"] = c.max_iter;
    o["seed"] = c.seed;
    return o.dump(2) + "\n";
}

std::string echo_config(const TrainCommandConfig& c) {
    ojson o;
    o["env"] = echo_grid(c.env);
    o["train"] = echo_train_section(c.train);
    o["agent"] = echo_agent_section(c.agent);
    o["run"] = echo_run_section(c.run);
    o["seed"] = c.seed;
    return o.dump(2) + "\n";
}

std::string echo_config(const EvalCommandConfig& c) {
    ojson o;
    o["env"] = echo_grid(c.env);
    o["checkpoint"] = c.checkpoint;
    o["policy"] = c.policy;
    o["operator"] = to_string(c.op);
    o["tol"] = c.tol;
    o["seed"] = c.seed;
    return o.dump(2) + "\n";
}

std::string echo_config(const TransferCommandConfig& c) {
    ojson o;
    o["env"] = echo_grid(c.env);
    o["source_checkpoint"] = c.source_checkpoint;
    o["train"] = echo_train_section(c.train);
    o["agent"] = echo_agent_section(c.agent);
    o["run"] = echo_run_section(c.run);
    o["seed"] = c.seed;
    return o.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace simsr
