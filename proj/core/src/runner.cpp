#include "simsr/runner.hpp"

#include "simsr/checkpoint.hpp"
#include "simsr/csv.hpp"
#include "simsr/errors.hpp"
#include "simsr/simsr_loss.hpp"
#include "simsr/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <limits>

namespace simsr {
namespace {

using ojson = nlohmann::ordered_json;

// Stream ids for derive_seed so every consumer of randomness is
// independent of the others.
enum Stream : std::uint64_t {
    kEnv = 1,
    kBehavior = 2,
    kBuffer = 3,
    kEncoderInit = 4,
    kDynamicsInit = 5,
    kCriticInit = 6,
    kActorInit = 7,
    kTrainNoise = 8,
    kEvalEnv = 9,
    kMdpBuild = 10,
    kPolicyBuild = 11,
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_summary(const std::string& path, const ojson& summary) {
    write_text_file(path, summary.dump(2) + "\n");
}

EncoderParams encoder_from_checkpoint(const std::string& path) {
    const auto sections = load_checkpoint(path);
    return {mlp_from_section(find_section(sections, "encoder_online"))};
}

EvalPoint evaluate_greedy(GridWorldEnv& eval_env, const ActorParams& actor,
                          const EncoderParams& encoder, int episodes, double gamma, long step) {
    EvalPoint point;
    point.step = step;
    for (int e = 0; e < episodes; ++e) {
        Vector obs = eval_env.reset();
        double ret = 0.0, dret = 0.0, g = 1.0;
        while (true) {
            const int a = act(actor, encode(encoder, obs), ActMode::greedy, nullptr);
            const Transition tr = eval_env.step(a);
            ret += tr.reward;
            dret += g * tr.reward;
            g *= gamma;
            if (tr.done) break;
            obs = tr.next_obs;
        }
        point.mean_return += ret / episodes;
        point.mean_discounted_return += dret / episodes;
    }
    return point;
}

std::vector<CheckpointSection> snapshot_sections(const TrainLoopResult& r) {
    std::vector<CheckpointSection> sections;
    sections.push_back(section_of("encoder_online", r.encoder.online.net));
    sections.push_back(section_of("encoder_target", r.encoder.target.net));
    if (r.ensemble)
        for (int k = 0; k < r.ensemble->size(); ++k)
            sections.push_back(
                section_of("dynamics_head_" + std::to_string(k), r.ensemble->heads[k]));
    if (r.critic) {
        sections.push_back(section_of("q1", r.critic->q1));
        sections.push_back(section_of("q2", r.critic->q2));
        sections.push_back(section_of("q1_target", r.critic->q1_target));
        sections.push_back(section_of("q2_target", r.critic->q2_target));
    }
    if (r.actor) sections.push_back(section_of("pi", r.actor->pi));
    return sections;
}

void write_step_rows(const std::string& path, const std::vector<StepRow>& rows) {
    CsvWriter csv(path, {"step", "simsr_loss", "dynamics_loss", "mean_embedding_norm",
                         "metric_approx_error", "q1_loss", "q2_loss", "actor_loss",
                         "actor_entropy"});
    for (const StepRow& r : rows)
        csv.write_row({static_cast<double>(r.step), r.simsr_loss, r.dynamics_loss,
                       r.mean_embedding_norm, r.metric_approx_error, r.q1_loss, r.q2_loss,
                       r.actor_loss, r.actor_entropy});
}

void write_episode_rows(const std::string& path, const std::vector<EpisodeRow>& rows) {
    CsvWriter csv(path, {"episode", "return", "length", "mean_q", "actor_entropy"});
    for (const EpisodeRow& r : rows)
        csv.write_row({static_cast<double>(r.episode), r.ret, static_cast<double>(r.length),
                       r.mean_q, r.actor_entropy});
}

void write_eval_rows(const std::string& path, const std::vector<EvalPoint>& rows) {
    CsvWriter csv(path, {"step", "mean_return", "mean_discounted_return"});
    for (const EvalPoint& r : rows)
        csv.write_row({static_cast<double>(r.step), r.mean_return, r.mean_discounted_return});
}

double eval_auc(const std::vector<EvalPoint>& evals) {
    std::vector<double> xs, ys;
    for (const EvalPoint& e : evals) {
        xs.push_back(static_cast<double>(e.step));
        ys.push_back(e.mean_discounted_return);
    }
    return auc_trapezoid(xs, ys);
}

}  // namespace

FiniteMDP build_mdp(const MdpSpecConfig& spec, std::uint64_t seed) {
    if (spec.kind == "grid") {
        GridWorldEnv env(spec.grid, 0);
        return env.underlying();
    }
    if (spec.kind == "random")
        return random_mdp(spec.n_states, spec.n_actions, derive_seed(seed, kMdpBuild),
                          spec.gamma_lo, spec.gamma_hi, spec.deterministic);
    return load_mdp(spec.path);
}

Policy build_policy(const std::string& name, const FiniteMDP& mdp, std::uint64_t seed) {
    if (name == "uniform") return uniform_policy(mdp.n_states, mdp.n_actions);
    if (name == "optimal") return optimal_policy(mdp);
    if (name == "random")
        return random_policy(mdp.n_states, mdp.n_actions, derive_seed(seed, kPolicyBuild));
    throw ValidationError("unknown policy '" + name + "'");
}

Matrix render_states(const ObservationEmitter& emitter, int phase) {
    Matrix obs(emitter.clean_dim(), emitter.obs_dim());
    for (int s = 0; s < emitter.clean_dim(); ++s) {
        const Vector o = emitter.mode() == DistractorMode::static_noise
                             ? emitter.emit(s, 0, phase)
                             : emitter.emit(s, phase, 0);
        obs.row(s) = o.transpose();
    }
    return obs;
}

int distractor_phase_count(const ObservationEmitter& emitter) {
    switch (emitter.mode()) {
        case DistractorMode::none: return 1;
        case DistractorMode::static_noise: return 10;  // distinct per-episode draws
        case DistractorMode::scrolling: return emitter.n_phases();
    }
    throw Error("unknown DistractorMode");
}

MetricQualityReport metric_quality(const EncoderParams& encoder, const ObservationEmitter& emitter,
                                   const DistanceMatrix& exact) {
    const int n = emitter.clean_dim();
    if (exact.rows() != n || exact.cols() != n)
        throw DimensionError("metric_quality: exact matrix does not match state count");

    const int phases = distractor_phase_count(emitter);
    std::vector<Matrix> embeddings;
    embeddings.reserve(phases);
    for (int p = 0; p < phases; ++p)
        embeddings.push_back(encode_batch(encoder, render_states(emitter, p)));

    const Matrix learned = cos_distance_matrix(embeddings[0], embeddings[0]);
    MetricQualityReport report;
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double err = std::abs(learned(i, j) - exact(i, j));
            report.max_abs_error = std::max(report.max_abs_error, err);
            report.mean_abs_error += err;
            xs.push_back(learned(i, j));
            ys.push_back(exact(i, j));
        }
    }
    const int pairs = n * (n - 1) / 2;
    if (pairs > 0) report.mean_abs_error /= pairs;
    report.spearman = pairs >= 2 ? spearman_rho(xs, ys) : 1.0;

    for (int p = 0; p < phases; ++p)
        for (int q = p + 1; q < phases; ++q)
            for (int s = 0; s < n; ++s)
                report.invariance_gap =
                    std::max(report.invariance_gap,
                             cos_distance(embeddings[p].row(s).transpose(),
                                          embeddings[q].row(s).transpose()));
    return report;
}

TrainLoopResult run_train_loop(const TrainCommandConfig& cfg) {
    cfg.train.validate();
    GridWorldEnv env(cfg.env, derive_seed(cfg.seed, kEnv));
    Rng act_rng(derive_seed(cfg.seed, kBehavior));
    Rng train_rng(derive_seed(cfg.seed, kTrainNoise));
    ReplayBuffer buffer(static_cast<std::size_t>(cfg.run.buffer_capacity), env.n_actions(),
                        derive_seed(cfg.seed, kBuffer));

    TrainLoopResult out{
        EncoderPair::make(env.obs_dim(), cfg.train.hidden_dim, cfg.train.latent_dim,
                          derive_seed(cfg.seed, kEncoderInit), cfg.train.momentum),
        {}, {}, {}, {}, {}, {}, {}};

    if (!cfg.run.load_encoder.empty()) {
        const EncoderParams loaded = encoder_from_checkpoint(cfg.run.load_encoder);
        if (loaded.obs_dim() != env.obs_dim())
            throw DimensionError("loaded encoder expects obs_dim " +
                                 std::to_string(loaded.obs_dim()) + " but env emits " +
                                 std::to_string(env.obs_dim()));
        out.encoder.online = loaded;
        out.encoder.target = loaded;
    }
    const bool freeze = cfg.run.freeze_encoder;
    const bool simsr_updates = cfg.run.train_encoder && !freeze;

    const bool need_dynamics =
        cfg.run.train_dynamics || cfg.train.target_variant == TargetVariant::LatentDynamics;
    if (need_dynamics && simsr_updates)
        out.ensemble = DynamicsEnsemble::make(cfg.train.latent_dim, env.n_actions(),
                                              cfg.train.hidden_dim, cfg.train.ensemble_k,
                                              derive_seed(cfg.seed, kDynamicsInit));

    if (cfg.agent.enabled) {
        out.critic = CriticParams::make(cfg.train.latent_dim, cfg.train.hidden_dim,
                                        env.n_actions(), derive_seed(cfg.seed, kCriticInit),
                                        cfg.agent.critic_tau, cfg.agent.critic_target_update_freq);
        out.actor = ActorParams::make(cfg.train.latent_dim, cfg.train.hidden_dim, env.n_actions(),
                                      derive_seed(cfg.seed, kActorInit), cfg.agent.alpha);
    }

    // Reference metric for the per-step approximation error column: the
    // uniform-policy fixed point of the (reward-scaled) underlying MDP.
    out.exact_reference =
        solve_fixed_point(env.underlying(),
                          uniform_policy(env.n_states(), env.n_actions()),
                          OperatorKind::IndependentCoupling, 1e-8)
            .distances;

    GridWorldEnv eval_env(cfg.env, derive_seed(cfg.seed, kEvalEnv));

    // Phase-0 renderings are pure, so they are computed once; the per-step
    // error column only needs the mean absolute error at this phase.
    const Matrix phase0 = render_states(env.emitter(), 0);
    const int n_states = env.n_states();
    const auto approx_error = [&](const EncoderParams& enc) {
        const Matrix z = encode_batch(enc, phase0);
        const Matrix learned = cos_distance_matrix(z, z);
        double mae = 0.0;
        int pairs = 0;
        for (int i = 0; i < n_states; ++i)
            for (int j = i + 1; j < n_states; ++j) {
                mae += std::abs(learned(i, j) - out.exact_reference(i, j));
                ++pairs;
            }
        return pairs > 0 ? mae / pairs : 0.0;
    };

    Vector obs = env.current_obs();
    double ep_return = 0.0;
    int ep_len = 0;
    long ep_index = 0;
    double ep_q_acc = 0.0, ep_h_acc = 0.0;
    long ep_updates = 0;

    for (long step = 1; step <= cfg.run.total_steps; ++step) {
        int action;
        if (!out.actor || cfg.run.behavior == "uniform" || step <= cfg.run.init_steps) {
            action = static_cast<int>(act_rng.uniform_int(env.n_actions()));
        } else {
            action = act(*out.actor, encode(out.encoder.online, obs), ActMode::sample, &act_rng);
        }

        const Transition tr = env.step(action);
        buffer.push(tr);
        ep_return += tr.reward;
        ++ep_len;

        if (step > cfg.run.init_steps) {
            const Batch batch = buffer.sample(cfg.train.batch_size);
            StepRow row;
            row.step = step;
            if (simsr_updates) {
                const StepMetrics m =
                    train_step(batch, out.encoder, out.ensemble ? &*out.ensemble : nullptr,
                               cfg.train, train_rng);
                row.simsr_loss = m.simsr_loss;
                row.dynamics_loss = m.dynamics_loss;
                row.mean_embedding_norm = m.mean_embedding_norm;
            }
            if (out.critic) {
                const bool enc_from_critic =
                    cfg.agent.update_encoder_from_critic && !freeze;
                const CriticUpdateResult cres =
                    critic_update(*out.critic, *out.actor, out.encoder, batch, cfg.env.gamma,
                                  cfg.agent.critic_lr, enc_from_critic);
                const ActorUpdateResult ares = actor_update(*out.actor, *out.critic,
                                                            out.encoder.online, batch,
                                                            cfg.agent.actor_lr);
                // Without a SimSR step the encoder EMA still has to track
                // the critic-driven encoder motion.
                if (!simsr_updates && enc_from_critic) ema_update(out.encoder);
                row.q1_loss = cres.q1_loss;
                row.q2_loss = cres.q2_loss;
                row.actor_loss = ares.loss;
                row.actor_entropy = ares.entropy;
                ep_q_acc += cres.mean_q;
                ep_h_acc += ares.entropy;
                ++ep_updates;
            }
            row.metric_approx_error = approx_error(out.encoder.online);
            out.steps.push_back(row);
        }

        if (tr.done) {
            EpisodeRow er;
            er.episode = ep_index++;
            er.ret = ep_return;
            er.length = ep_len;
            er.mean_q = ep_updates > 0 ? ep_q_acc / ep_updates : 0.0;
            er.actor_entropy = ep_updates > 0 ? ep_h_acc / ep_updates : 0.0;
            out.episodes.push_back(er);
            ep_return = 0.0;
            ep_len = 0;
            ep_q_acc = ep_h_acc = 0.0;
            ep_updates = 0;
            obs = env.reset();
        } else {
            obs = tr.next_obs;
        }

        if (out.actor && step % cfg.run.eval_every == 0)
            out.evals.push_back(evaluate_greedy(eval_env, *out.actor, out.encoder.online,
                                                cfg.run.eval_episodes, cfg.env.gamma, step));
    }
    return out;
}

void run_solve_metric(const SolveMetricConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    write_text_file(out_dir + "/resolved_config.json", echo_config(cfg));

    const FiniteMDP mdp = build_mdp(cfg.mdp, cfg.seed);
    const Policy policy = build_policy(cfg.policy, mdp, cfg.seed);
    const FixedPointReport report = solve_fixed_point(mdp, policy, cfg.op, cfg.tol, cfg.max_iter);

    write_matrix_csv(out_dir + "/distances.csv", report.distances);
    ojson summary;
    summary["operator"] = to_string(cfg.op);
    summary["policy"] = cfg.policy;
    summary["n_states"] = mdp.n_states;
    summary["gamma"] = mdp.gamma;
    summary["tol"] = cfg.tol;
    summary["iterations"] = report.iterations;
    summary["final_residual"] = report.final_residual;
    write_summary(out_dir + "/summary.json", summary);
}

void run_train(const TrainCommandConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    write_text_file(out_dir + "/resolved_config.json", echo_config(cfg));

    const TrainLoopResult res = run_train_loop(cfg);

    write_step_rows(out_dir + "/steps.csv", res.steps);
    write_episode_rows(out_dir + "/episodes.csv", res.episodes);
    if (!res.evals.empty()) write_eval_rows(out_dir + "/eval.csv", res.evals);
    save_checkpoint(out_dir + "/checkpoint.ckpt", snapshot_sections(res));

    ojson summary;
    summary["total_steps"] = cfg.run.total_steps;
    summary["episodes"] = res.episodes.size();
    summary["updates"] = res.steps.size();
    if (!res.steps.empty()) {
        summary["final_simsr_loss"] = res.steps.back().simsr_loss;
        summary["final_dynamics_loss"] = res.steps.back().dynamics_loss;
        summary["final_metric_approx_error"] = res.steps.back().metric_approx_error;
    }
    if (!res.evals.empty()) {
        summary["final_eval_return"] = res.evals.back().mean_return;
        summary["final_eval_discounted_return"] = res.evals.back().mean_discounted_return;
    }
    write_summary(out_dir + "/summary.json", summary);
}

void run_eval_metric_quality(const EvalCommandConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    write_text_file(out_dir + "/resolved_config.json", echo_config(cfg));

    GridWorldEnv env(cfg.env, derive_seed(cfg.seed, kEnv));
    const EncoderParams encoder = encoder_from_checkpoint(cfg.checkpoint);
    if (encoder.obs_dim() != env.obs_dim())
        throw DimensionError("checkpoint encoder expects obs_dim " +
                             std::to_string(encoder.obs_dim()) + " but env emits " +
                             std::to_string(env.obs_dim()));

    const Policy policy = build_policy(cfg.policy, env.underlying(), cfg.seed);
    const DistanceMatrix exact =
        solve_fixed_point(env.underlying(), policy, cfg.op, cfg.tol).distances;
    const MetricQualityReport report = metric_quality(encoder, env.emitter(), exact);

    const Matrix embeddings = encode_batch(encoder, render_states(env.emitter(), 0));
    write_matrix_csv(out_dir + "/embeddings.csv", embeddings);
    write_matrix_csv(out_dir + "/learned_distances.csv",
                     cos_distance_matrix(embeddings, embeddings));
    write_matrix_csv(out_dir + "/exact_distances.csv", exact);

    ojson summary;
    summary["max_abs_error"] = report.max_abs_error;
    summary["mean_abs_error"] = report.mean_abs_error;
    summary["spearman_rho"] = report.spearman;
    summary["invariance_gap"] = report.invariance_gap;
    summary["phases"] = distractor_phase_count(env.emitter());
    write_summary(out_dir + "/report.json", summary);
}

void run_transfer(const TransferCommandConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    write_text_file(out_dir + "/resolved_config.json", echo_config(cfg));

    TrainCommandConfig frozen{cfg.env, cfg.train, cfg.agent, cfg.run, cfg.seed};
    frozen.run.load_encoder = cfg.source_checkpoint;
    frozen.run.freeze_encoder = true;
    frozen.run.train_encoder = false;
    frozen.run.train_dynamics = false;
    frozen.run.behavior = "agent";

    TrainCommandConfig scratch{cfg.env, cfg.train, cfg.agent, cfg.run, cfg.seed};
    scratch.run.load_encoder.clear();
    scratch.run.freeze_encoder = false;
    scratch.run.behavior = "agent";

    const TrainLoopResult frozen_res = run_train_loop(frozen);
    const TrainLoopResult scratch_res = run_train_loop(scratch);
    if (frozen_res.evals.size() < 2 || scratch_res.evals.size() < 2)
        throw ValidationError("transfer: need at least 2 eval points per arm for AUC");

    write_eval_rows(out_dir + "/eval_frozen.csv", frozen_res.evals);
    write_eval_rows(out_dir + "/eval_scratch.csv", scratch_res.evals);

    const double auc_frozen = eval_auc(frozen_res.evals);
    const double auc_scratch = eval_auc(scratch_res.evals);
    ojson summary;
    summary["auc_frozen"] = auc_frozen;
    summary["auc_scratch"] = auc_scratch;
    summary["frozen_minus_scratch"] = auc_frozen - auc_scratch;
    summary["frozen_wins"] = auc_frozen >= auc_scratch;
    write_summary(out_dir + "/summary.json", summary);
}

}  // namespace simsr
