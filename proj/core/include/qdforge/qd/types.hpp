#ifndef QDFORGE_QD_TYPES_HPP
#define QDFORGE_QD_TYPES_HPP

#include <vector>

namespace qdforge::qd {

// Flat real-valued policy parameters; the evolved unit.
struct Genome {
    std::vector<double> params;
};

struct Individual {
    Genome genome;
    double fitness = 0.0;
    std::vector<double> raw_bd;          // env-specific raw behavior record
    std::vector<double> latent_bd;       // learned descriptor (or hard-coded BD)
    std::vector<double> ground_truth_bd; // low-dim descriptor for metrics
    int cell = -1;                       // grid cell, -1 while unassigned
};

} // namespace qdforge::qd

#endif
