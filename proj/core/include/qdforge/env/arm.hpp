#ifndef QDFORGE_ENV_ARM_HPP
#define QDFORGE_ENV_ARM_HPP

#include <qdforge/env/env.hpp>
#include <qdforge/env/policy.hpp>

#include <array>

namespace qdforge::env {

// Analytic 6-joint serial chain: revolute joints about alternating Z/Y
// axes, each followed by an equal-length link along the local X axis.
struct ArmChain {
    static constexpr std::size_t joint_count = 6;

    double link_length = 0.2;
    std::array<std::array<double, 2>, joint_count> limits;
    std::array<double, 3> goal{0.3, 0.0, 0.5};
    int steps = 300;
    double dt = 0.05;
    double joint_vel_max = 1.0;

    static ArmChain make(bool constrained_joints);
};

std::array<double, 3> forward_kinematics(const ArmChain& chain, std::span<const double> joints);

class ArmEnv : public Environment {
public:
    explicit ArmEnv(ArmChain chain);

    EvalOutcome evaluate(const qd::Genome& genome) const override;
    std::size_t genome_size() const override { return _policy.param_count(); }
    std::size_t raw_bd_dim() const override { return ArmChain::joint_count; }
    std::size_t ground_truth_dim() const override { return ArmChain::joint_count; }
    std::string kind() const override { return "arm"; }

    const ArmChain& chain() const { return _chain; }
    const PolicySpec& policy() const { return _policy; }

private:
    ArmChain _chain;
    PolicySpec _policy;
};

} // namespace qdforge::env

#endif
