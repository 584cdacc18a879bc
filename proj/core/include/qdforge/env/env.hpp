#ifndef QDFORGE_ENV_ENV_HPP
#define QDFORGE_ENV_ENV_HPP

#include <qdforge/qd/types.hpp>

#include <string>
#include <vector>

namespace qdforge::env {

struct EvalOutcome {
    double fitness = 0.0;
    std::vector<double> raw_bd;
    std::vector<double> ground_truth_bd;
};

// Immutable task configuration; evaluate() is pure, so any number of
// evaluations may run concurrently.
class Environment {
public:
    virtual ~Environment() = default;
    virtual EvalOutcome evaluate(const qd::Genome& genome) const = 0;
    virtual std::size_t genome_size() const = 0;
    virtual std::size_t raw_bd_dim() const = 0;
    virtual std::size_t ground_truth_dim() const = 0;
    virtual std::string kind() const = 0;
};

} // namespace qdforge::env

#endif
