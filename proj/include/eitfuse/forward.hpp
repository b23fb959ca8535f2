#pragma once

#include "eitfuse/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace eitfuse {

/// Per-element conductivity in S/m.
class ConductivityField {
public:
    ConductivityField() = default;
    /// Throws ConfigError unless every value is finite and positive.
    explicit ConductivityField(std::vector<double> values);
    static ConductivityField uniform(std::size_t elements, double value);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t e) const { return values_[e]; }
    std::span<const double> values() const { return values_; }

    ConductivityField scaled(double k) const;

private:
    std::vector<double> values_;
};

struct ElectrodePair {
    int first = 0;
    int second = 0;
    friend bool operator==(const ElectrodePair&, const ElectrodePair&) = default;
};

/// All unordered electrode pairs (i, j), i < j, in lexicographic order.
class PairSchedule {
public:
    PairSchedule() = default;
    /// Throws ConfigError for n < 2.
    static PairSchedule all_pairs(int electrode_count);

    int electrode_count() const { return electrode_count_; }
    std::size_t size() const { return pairs_.size(); }
    const ElectrodePair& operator[](std::size_t m) const { return pairs_[m]; }
    std::span<const ElectrodePair> pairs() const { return pairs_; }
    /// Row index of pair (i, j) in either order.
    std::size_t index_of(int i, int j) const;

private:
    int electrode_count_ = 0;
    std::vector<ElectrodePair> pairs_;
};

/// Two-terminal voltages, one per schedule entry.
struct VoltageFrame {
    PairSchedule schedule;
    std::vector<double> values;

    /// Throws ConfigError on length mismatch or non-finite entries.
    void validate() const;
};

/// Factorized stiffness system for one conductivity field. Solving is done
/// once per electrode; pair solutions follow by superposition.
class ForwardSolver {
public:
    /// Throws ConfigError on size mismatch, SolverError if the grounded
    /// stiffness matrix cannot be factorized.
    ForwardSolver(const Mesh& mesh, const ConductivityField& field);

    const Mesh& mesh() const { return *mesh_; }

    /// Nodal potential for unit current into electrode k, drained at the
    /// ground node.
    const Eigen::VectorXd& electrode_potential(int k) const { return potentials_[k]; }

    /// Nodal potential for `current` injected at i and extracted at j.
    Eigen::VectorXd pair_potential(int i, int j, double current = 1.0) const;

    /// Mean potential over electrode k, weighted like the injected current.
    double electrode_voltage(const Eigen::VectorXd& u, int k) const;

    VoltageFrame frame(const PairSchedule& schedule, double current = 1.0) const;

private:
    const Mesh* mesh_;
    std::vector<Eigen::VectorXd> potentials_;
};

/// Local P1 stiffness matrix of element e for unit conductivity.
Eigen::Matrix3d unit_element_stiffness(const Mesh& mesh, std::size_t e);

/// Gradient of a nodal field on element e (constant for P1).
Eigen::Vector2d element_gradient(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u);

VoltageFrame forward_solve(const Mesh& mesh, const ConductivityField& field,
                           const PairSchedule& schedule, double current = 1.0);

} // namespace eitfuse
