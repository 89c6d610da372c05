#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"

namespace swarmopt {

/// Synchronous per-round message channel between graph neighbors. Payloads
/// are the agents' flat iterate vectors.
struct ChannelConfig {
    double drop_probability = 0.0;  // per directed message
    std::uint64_t seed = 0;

    void validate_or_throw() const;
};

struct DeliveryEvent {
    int round = 0;
    AgentId sender = 0;
    AgentId receiver = 0;
    bool delivered = true;
};

/// Transport abstraction the consensus engine talks to. One round:
/// every agent posts its new iterate, the barrier completes, and each agent
/// reads what it now attributes to each neighbor via delivered().
class Exchange {
public:
    virtual ~Exchange() = default;

    /// Installs the round-0 iterates as common knowledge: before any round
    /// runs, every agent already attributes the initial value to each
    /// neighbor. Not a channel event, so it is never logged or dropped.
    virtual void seed(const std::vector<Eigen::VectorXd>& initial, const CommGraph& g) = 0;

    /// Synchronous barrier for one round: collects every agent's outgoing
    /// payload and resolves what each neighbor pair receives.
    virtual void exchange(int round, const std::vector<Eigen::VectorXd>& outgoing,
                          const CommGraph& g) = 0;

    /// Payload receiver currently attributes to sender (a graph neighbor):
    /// the latest delivered value, which is stale after a dropped message.
    virtual const Eigen::VectorXd& delivered(AgentId receiver, AgentId sender) const = 0;
};

/// Zero-overhead reference transport: every exchange delivers exactly the
/// posted payloads. The lossless baseline the simulated channel is checked
/// against.
class DirectExchange final : public Exchange {
public:
    void seed(const std::vector<Eigen::VectorXd>& initial, const CommGraph& g) override;
    void exchange(int round, const std::vector<Eigen::VectorXd>& outgoing,
                  const CommGraph& g) override;
    const Eigen::VectorXd& delivered(AgentId receiver, AgentId sender) const override;

private:
    std::vector<std::map<AgentId, Eigen::VectorXd>> mailbox_;
};

/// Channel with seeded i.i.d. per-message drops and stale-value fallback.
/// Drop decisions are drawn in ascending (sender, receiver) order so a run is
/// fully determined by (seed, scenario). The delivery log records every
/// channel decision for reproducibility audits.
class SimulatedChannel final : public Exchange {
public:
    explicit SimulatedChannel(const ChannelConfig& cfg);

    void seed(const std::vector<Eigen::VectorXd>& initial, const CommGraph& g) override;
    void exchange(int round, const std::vector<Eigen::VectorXd>& outgoing,
                  const CommGraph& g) override;
    const Eigen::VectorXd& delivered(AgentId receiver, AgentId sender) const override;

    const std::vector<DeliveryEvent>& log() const { return log_; }
    /// Changes the drop rate mid-run (stale-fallback experiments).
    void set_drop_probability(double p);

private:
    double uniform();  // one reproducible draw in [0, 1)

    ChannelConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<std::map<AgentId, Eigen::VectorXd>> mailbox_;
    std::vector<DeliveryEvent> log_;
};

/// Writes `round,sender,receiver,status` rows (status: delivered|dropped).
void write_delivery_csv(const std::vector<DeliveryEvent>& log, const std::string& path);

}  // namespace swarmopt
