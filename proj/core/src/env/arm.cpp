#include <qdforge/env/arm.hpp>
#include <qdforge/common.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace qdforge::env {

namespace {
    PolicySpec arm_policy()
    {
        using autodiff::Activation;
        PolicySpec p;
        p.sizes = {6, 32, 32, 6};
        p.activations = {Activation::gaussian, Activation::gaussian, std::nullopt};
        return p;
    }
} // namespace

ArmChain ArmChain::make(bool constrained_joints)
{
    ArmChain c;
    for (auto& lim : c.limits)
        lim = {-2.967, 2.967};
    if (constrained_joints) {
        c.limits[0] = {-0.5, 0.5};
        c.limits[1] = {-0.5, 0.5};
    }
    return c;
}

std::array<double, 3> forward_kinematics(const ArmChain& chain, std::span<const double> joints)
{
    if (joints.size() != ArmChain::joint_count)
        throw UsageError("forward_kinematics: expected " + std::to_string(ArmChain::joint_count) + " joints");
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    const Eigen::Vector3d link(chain.link_length, 0.0, 0.0);
    for (std::size_t j = 0; j < ArmChain::joint_count; j++) {
        Eigen::Vector3d axis = (j % 2 == 0) ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitY();
        rot = rot * Eigen::AngleAxisd(joints[j], axis).toRotationMatrix();
        pos += rot * link;
    }
    return {pos.x(), pos.y(), pos.z()};
}

ArmEnv::ArmEnv(ArmChain chain) : _chain(chain), _policy(arm_policy()) {}

EvalOutcome ArmEnv::evaluate(const qd::Genome& genome) const
{
    std::array<double, ArmChain::joint_count> q{};
    for (std::size_t j = 0; j < q.size(); j++)
        q[j] = std::clamp(0.0, _chain.limits[j][0], _chain.limits[j][1]);

    std::array<double, ArmChain::joint_count> vel{};
    for (int step = 0; step < _chain.steps; step++) {
        _policy.forward(genome.params, q, vel);
        for (std::size_t j = 0; j < q.size(); j++) {
            double v = std::clamp(vel[j], -_chain.joint_vel_max, _chain.joint_vel_max);
            q[j] = std::clamp(q[j] + v * _chain.dt, _chain.limits[j][0], _chain.limits[j][1]);
        }
    }

    auto tip = forward_kinematics(_chain, q);
    double dx = _chain.goal[0] - tip[0];
    double dy = _chain.goal[1] - tip[1];
    double dz = _chain.goal[2] - tip[2];

    EvalOutcome out;
    out.fitness = std::exp(-std::sqrt(dx * dx + dy * dy + dz * dz));
    out.raw_bd.assign(q.begin(), q.end());
    out.ground_truth_bd.assign(q.begin(), q.end());
    return out;
}

} // namespace qdforge::env
