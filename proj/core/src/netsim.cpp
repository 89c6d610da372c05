#include "swarmopt/netsim.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace swarmopt {

namespace {

void check_outgoing(const std::vector<Eigen::VectorXd>& outgoing, const CommGraph& g,
                    const char* what) {
    if (static_cast<int>(outgoing.size()) != g.n_agents()) {
        throw ShapeError(std::string(what) + ": expected one payload per agent (" +
                         std::to_string(g.n_agents()) + "), got " +
                         std::to_string(outgoing.size()));
    }
}

const Eigen::VectorXd& mailbox_lookup(
    const std::vector<std::map<AgentId, Eigen::VectorXd>>& mailbox, AgentId receiver,
    AgentId sender, const char* what) {
    if (receiver < 0 || receiver >= static_cast<int>(mailbox.size())) {
        throw std::out_of_range(std::string(what) + ": receiver " + std::to_string(receiver) +
                                " out of range");
    }
    const auto& slots = mailbox[receiver];
    const auto it = slots.find(sender);
    if (it == slots.end()) {
        throw Error(std::string(what) + ": agent " + std::to_string(receiver) +
                    " holds nothing from agent " + std::to_string(sender) +
                    " (not a neighbor, or channel never seeded)");
    }
    return it->second;
}

}  // namespace

void ChannelConfig::validate_or_throw() const {
    if (!(drop_probability >= 0.0 && drop_probability < 1.0)) {
        throw Error("ChannelConfig: drop_probability must lie in [0, 1)");
    }
}

void DirectExchange::seed(const std::vector<Eigen::VectorXd>& initial, const CommGraph& g) {
    check_outgoing(initial, g, "DirectExchange::seed");
    mailbox_.assign(g.n_agents(), {});
    exchange(0, initial, g);
}

void DirectExchange::exchange(int /*round*/, const std::vector<Eigen::VectorXd>& outgoing,
                              const CommGraph& g) {
    check_outgoing(outgoing, g, "DirectExchange::exchange");
    for (AgentId sender = 0; sender < g.n_agents(); ++sender) {
        for (AgentId receiver : g.neighbors(sender)) {
            mailbox_[receiver][sender] = outgoing[sender];
        }
    }
}

const Eigen::VectorXd& DirectExchange::delivered(AgentId receiver, AgentId sender) const {
    return mailbox_lookup(mailbox_, receiver, sender, "DirectExchange::delivered");
}

SimulatedChannel::SimulatedChannel(const ChannelConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate_or_throw();
}

double SimulatedChannel::uniform() {
    // Top 53 bits of one engine draw; identical across platforms, unlike
    // std::uniform_real_distribution.
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void SimulatedChannel::set_drop_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0) || std::isnan(p)) {
        throw Error("SimulatedChannel: drop probability must lie in [0, 1]");
    }
    cfg_.drop_probability = p;
}

void SimulatedChannel::seed(const std::vector<Eigen::VectorXd>& initial, const CommGraph& g) {
    check_outgoing(initial, g, "SimulatedChannel::seed");
    mailbox_.assign(g.n_agents(), {});
    for (AgentId sender = 0; sender < g.n_agents(); ++sender) {
        for (AgentId receiver : g.neighbors(sender)) {
            mailbox_[receiver][sender] = initial[sender];
        }
    }
}

void SimulatedChannel::exchange(int round, const std::vector<Eigen::VectorXd>& outgoing,
                                const CommGraph& g) {
    check_outgoing(outgoing, g, "SimulatedChannel::exchange");
    if (mailbox_.size() != static_cast<size_t>(g.n_agents())) {
        mailbox_.assign(g.n_agents(), {});
    }
    for (AgentId sender = 0; sender < g.n_agents(); ++sender) {
        for (AgentId receiver : g.neighbors(sender)) {
            const bool delivered = uniform() >= cfg_.drop_probability;
            log_.push_back({round, sender, receiver, delivered});
            if (delivered) {
                mailbox_[receiver][sender] = outgoing[sender];
            } else if (mailbox_[receiver].find(sender) == mailbox_[receiver].end()) {
                throw NoPriorMessageError(round, sender, receiver);
            }
            // dropped with a prior delivery: receiver keeps the stale payload
        }
    }
}

const Eigen::VectorXd& SimulatedChannel::delivered(AgentId receiver, AgentId sender) const {
    return mailbox_lookup(mailbox_, receiver, sender, "SimulatedChannel::delivered");
}

void write_delivery_csv(const std::vector<DeliveryEvent>& log, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot open " + path + " for writing");
    std::fputs("round,sender,receiver,status\n", f);
    for (const auto& e : log) {
        std::fprintf(f, "%d,%d,%d,%s\n", e.round, e.sender, e.receiver,
                     e.delivered ? "delivered" : "dropped");
    }
    if (std::fclose(f) != 0) throw Error("failed to finish writing " + path);
}

}  // namespace swarmopt
