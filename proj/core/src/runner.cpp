#include "swarmopt/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "swarmopt/local_variable.hpp"
#include "swarmopt/trajopt.hpp"

namespace swarmopt {

namespace {

constexpr double kGoalSpeedLimit = 0.1;  // m/s, arrival requires near-rest

/// Shared first-step guess: every agent walks a straight line to its goal
/// with hover inputs. All agents build the identical variable, so the very
/// first round starts from perfect consensus.
Eigen::VectorXd straight_line_guess(const ScenarioConfig& cfg) {
    const int n = cfg.n_agents;
    const int H = cfg.mpc.horizon;
    LocalVariable proto(n, H);
    const InputVec hover = ControlInput{cfg.drone.mass * cfg.drone.gravity,
                                        Eigen::Vector3d::Zero()}.stacked();
    for (int a = 0; a < n; ++a) {
        const Eigen::Vector3d start = cfg.agents[a].initial_state.head<3>();
        const Eigen::Vector3d goal = cfg.agents[a].goal;
        for (int k = 0; k <= H; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(H);
            StateVec x = StateVec::Zero();
            x.head<3>() = (1.0 - t) * start + t * goal;
            proto.state(a, k) = x;
        }
        for (int k = 0; k < H; ++k) proto.input(a, k) = hover;
    }
    return proto.flat();
}

/// Warm start for the next MPC step: drop the executed first interval,
/// repeat the horizon-end entries.
Eigen::VectorXd shift_iterate(const Eigen::VectorXd& flat, int n, int H) {
    LocalVariable old(n, H, flat);
    LocalVariable next(n, H);
    for (int a = 0; a < n; ++a) {
        for (int k = 0; k < H; ++k) next.state(a, k) = old.state(a, k + 1);
        next.state(a, H) = old.state(a, H);
        for (int k = 0; k + 1 < H; ++k) next.input(a, k) = old.input(a, k + 1);
        next.input(a, H - 1) = old.input(a, H - 1);
    }
    return next.flat();
}

double min_pairwise_distance(const std::vector<StateVec>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.size(); ++i) {
        for (size_t j = i + 1; j < x.size(); ++j) {
            best = std::min(best, (x[i].head<3>() - x[j].head<3>()).norm());
        }
    }
    return best;
}

void write_float(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

}  // namespace

StateVec goal_state(const Eigen::Vector3d& goal_position) {
    StateVec x = StateVec::Zero();
    x.head<3>() = goal_position;
    return x;
}

bool goal_reached(const StateVec& x, const Eigen::Vector3d& goal, double tol) {
    return (x.head<3>() - goal).norm() <= tol && x.segment<3>(3).norm() < kGoalSpeedLimit;
}

RunResult mpc_loop(const ScenarioConfig& cfg, ExchangeMode mode) {
    cfg.validate_or_throw();
    const int n = cfg.n_agents;
    const int H = cfg.mpc.horizon;
    const CommGraph g = cfg.make_graph();

    MpcLocalProblem problem(g, cfg.mpc, cfg.solver, cfg.drone);
    for (int i = 0; i < n; ++i) {
        problem.set_reference(
            i, std::vector<StateVec>(H + 1, goal_state(cfg.agents[i].goal)));
    }

    std::unique_ptr<Exchange> exchange;
    SimulatedChannel* channel = nullptr;
    if (mode == ExchangeMode::Simulated) {
        auto c = std::make_unique<SimulatedChannel>(cfg.channel);
        channel = c.get();
        exchange = std::move(c);
    } else {
        exchange = std::make_unique<DirectExchange>();
    }

    RunResult out;
    out.n_agents = n;
    out.timestep = cfg.mpc.timestep;
    out.states.resize(n);
    out.inputs.resize(n);
    out.goal_step.assign(n, -1);

    std::vector<StateVec> x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = cfg.agents[i].initial_state;
        out.states[i].push_back(x[i]);
    }

    std::vector<Eigen::VectorXd> warm(n, straight_line_guess(cfg));
    const Eigen::Index flat_size = warm[0].size();

    const auto all_at_goal = [&](const std::vector<StateVec>& states) {
        for (int i = 0; i < n; ++i) {
            if (!goal_reached(states[i], cfg.agents[i].goal, cfg.goal_tolerance)) return false;
        }
        return true;
    };

    int step = 0;
    out.all_reached = all_at_goal(x);
    while (!out.all_reached && step < cfg.mpc_max_steps) {
        for (int i = 0; i < n; ++i) problem.set_initial_state(i, x[i]);

        // Multipliers restart from zero every MPC step: the subproblem data
        // (initial states, hence the whole rollout map) changed under them.
        SwarmIterate init;
        init.theta = warm;
        init.lambda.assign(n, Eigen::VectorXd::Zero(flat_size));
        init.round = 0;

        AdmmResult admm;
        try {
            admm = run_admm(init, problem, g, cfg.admm, *exchange);
        } catch (const Error& e) {
            throw Error("MPC step " + std::to_string(step) + ": " + e.what());
        }
        out.residuals.push_back(std::move(admm.history));
        out.step_converged.push_back(admm.converged);

        // Each agent trusts its own block of its own converged copy.
        for (int i = 0; i < n; ++i) {
            LocalVariable theta_i(n, H, admm.iterate.theta[i]);
            const InputVec u = theta_i.input(i, 0);
            out.inputs[i].push_back(u);
            try {
                x[i] = rk4_step(StateVec(x[i]), u, cfg.mpc.timestep, cfg.drone);
            } catch (const Error& e) {
                throw Error("MPC step " + std::to_string(step) + ", agent " +
                            std::to_string(i) + ": " + e.what());
            }
            out.states[i].push_back(x[i]);
        }

        for (int i = 0; i < n; ++i) {
            warm[i] = shift_iterate(admm.iterate.theta[i], n, H);
        }

        ++step;
        out.all_reached = all_at_goal(x);
    }
    out.steps_executed = step;

    // Per-state bookkeeping over the executed trajectory.
    const size_t n_states = out.states[0].size();
    out.min_distance.resize(n_states);
    for (size_t s = 0; s < n_states; ++s) {
        std::vector<StateVec> snapshot;
        snapshot.reserve(n);
        for (int i = 0; i < n; ++i) snapshot.push_back(out.states[i][s]);
        out.min_distance[s] = min_pairwise_distance(snapshot);
        for (int i = 0; i < n; ++i) {
            if (out.goal_step[i] < 0 &&
                goal_reached(out.states[i][s], cfg.agents[i].goal, cfg.goal_tolerance)) {
                out.goal_step[i] = static_cast<int>(s);
            }
        }
    }

    if (channel) out.delivery_log = channel->log();
    return out;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir + ": " + ec.message());

    // trajectories.csv: one row per (state index, agent); the input columns
    // hold the input applied at that step, zeros on the final row (nothing is
    // applied after the last state).
    {
        const std::string path = out_dir + "/trajectories.csv";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw Error("cannot open " + path + " for writing");
        std::fputs(
            "step,agent,px,py,pz,vx,vy,vz,roll,pitch,yaw,wx,wy,wz,thrust,taux,tauy,tauz\n",
            f);
        const size_t n_states = result.states.empty() ? 0 : result.states[0].size();
        for (size_t s = 0; s < n_states; ++s) {
            for (int a = 0; a < result.n_agents; ++a) {
                std::fprintf(f, "%zu,%d", s, a);
                const StateVec& x = result.states[a][s];
                for (int c = 0; c < kStateDim; ++c) {
                    std::fputc(',', f);
                    write_float(f, x(c));
                }
                const bool has_input = s < result.inputs[a].size();
                for (int c = 0; c < kInputDim; ++c) {
                    std::fputc(',', f);
                    write_float(f, has_input ? result.inputs[a][s](c) : 0.0);
                }
                std::fputc('\n', f);
            }
        }
        if (std::fclose(f) != 0) throw Error("failed to finish writing " + path);
    }

    // residuals.csv: the consensus iteration trace of every MPC step.
    {
        const std::string path = out_dir + "/residuals.csv";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw Error("cannot open " + path + " for writing");
        std::fputs("mpc_step,round,consensus_residual,dual_residual\n", f);
        for (size_t s = 0; s < result.residuals.size(); ++s) {
            for (const auto& rec : result.residuals[s]) {
                std::fprintf(f, "%zu,%d,", s, rec.round);
                write_float(f, rec.consensus_residual);
                std::fputc(',', f);
                write_float(f, rec.dual_residual);
                std::fputc('\n', f);
            }
        }
        if (std::fclose(f) != 0) throw Error("failed to finish writing " + path);
    }

    // summary.json: headline metrics; min_distance is null when there are no
    // agent pairs.
    {
        nlohmann::ordered_json j;
        j["n_agents"] = result.n_agents;
        j["mpc_steps"] = result.steps_executed;
        j["all_reached"] = result.all_reached;
        j["goal_reached_step"] = result.goal_step;
        double min_dist = std::numeric_limits<double>::infinity();
        for (const double d : result.min_distance) min_dist = std::min(min_dist, d);
        if (std::isfinite(min_dist)) {
            j["min_distance"] = min_dist;
        } else {
            j["min_distance"] = nullptr;
        }
        nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
        for (const auto& hist : result.residuals) {
            rounds.push_back(hist.size());
        }
        j["rounds_per_step"] = std::move(rounds);
        int converged_steps = 0;
        for (const bool c : result.step_converged) converged_steps += c ? 1 : 0;
        j["converged_steps"] = converged_steps;

        const std::string path = out_dir + "/summary.json";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw Error("cannot open " + path + " for writing");
        const std::string text = j.dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), f);
        if (std::fclose(f) != 0) throw Error("failed to finish writing " + path);
    }

    write_delivery_csv(result.delivery_log, out_dir + "/delivery.csv");
}

}  // namespace swarmopt
