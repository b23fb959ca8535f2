#include "eitfuse/forward.hpp"

#include "eitfuse/errors.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace eitfuse {

ConductivityField::ConductivityField(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t e = 0; e < values_.size(); ++e) {
        if (!std::isfinite(values_[e]) || values_[e] <= 0.0) {
            throw ConfigError("conductivity must be finite and positive (element " +
                              std::to_string(e) + ")");
        }
    }
}

ConductivityField ConductivityField::uniform(std::size_t elements, double value) {
    return ConductivityField(std::vector<double>(elements, value));
}

ConductivityField ConductivityField::scaled(double k) const {
    std::vector<double> v(values_);
    for (double& x : v) {
        x *= k;
    }
    return ConductivityField(std::move(v));
}

PairSchedule PairSchedule::all_pairs(int electrode_count) {
    if (electrode_count < 2) {
        throw ConfigError("pair schedule needs at least 2 electrodes");
    }
    PairSchedule s;
    s.electrode_count_ = electrode_count;
    for (int i = 0; i < electrode_count; ++i) {
        for (int j = i + 1; j < electrode_count; ++j) {
            s.pairs_.push_back({i, j});
        }
    }
    return s;
}

std::size_t PairSchedule::index_of(int i, int j) const {
    if (i > j) {
        std::swap(i, j);
    }
    if (i < 0 || j >= electrode_count_ || i == j) {
        throw ConfigError("invalid electrode pair");
    }
    // Rows before i: sum_{r<i} (n-1-r).
    const int n = electrode_count_;
    return static_cast<std::size_t>(i * (2 * n - i - 1) / 2 + (j - i - 1));
}

void VoltageFrame::validate() const {
    if (values.size() != schedule.size()) {
        throw ConfigError("voltage frame length " + std::to_string(values.size()) +
                          " does not match schedule length " + std::to_string(schedule.size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ConfigError("voltage frame contains non-finite values");
        }
    }
}

Eigen::Matrix3d unit_element_stiffness(const Mesh& mesh, std::size_t e) {
    const auto& el = mesh.elements[e];
    const Point p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
    // Barycentric gradients scaled by 2A.
    Eigen::Matrix<double, 3, 2> g;
    g << p1.y - p2.y, p2.x - p1.x,
         p2.y - p0.y, p0.x - p2.x,
         p0.y - p1.y, p1.x - p0.x;
    const double area = mesh.element_areas[e];
    return (g * g.transpose()) / (4.0 * area);
}

Eigen::Vector2d element_gradient(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u) {
    const auto& el = mesh.elements[e];
    const Point p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
    const double two_area = 2.0 * mesh.element_areas[e];
    const double u0 = u[el[0]], u1 = u[el[1]], u2 = u[el[2]];
    return {(u0 * (p1.y - p2.y) + u1 * (p2.y - p0.y) + u2 * (p0.y - p1.y)) / two_area,
            (u0 * (p2.x - p1.x) + u1 * (p0.x - p2.x) + u2 * (p1.x - p0.x)) / two_area};
}

ForwardSolver::ForwardSolver(const Mesh& mesh, const ConductivityField& field) : mesh_(&mesh) {
    if (field.size() != mesh.element_count()) {
        throw ConfigError("conductivity field has " + std::to_string(field.size()) +
                          " values, mesh has " + std::to_string(mesh.element_count()) +
                          " elements");
    }
    const int n = static_cast<int>(mesh.node_count());
    const int ground = mesh.ground_node;
    auto reduced = [ground](int node) { return node < ground ? node : node - 1; };

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.element_count() * 9);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const Eigen::Matrix3d k = field[e] * unit_element_stiffness(mesh, e);
        const auto& el = mesh.elements[e];
        for (int a = 0; a < 3; ++a) {
            if (el[a] == ground) continue;
            for (int b = 0; b < 3; ++b) {
                if (el[b] == ground) continue;
                triplets.emplace_back(reduced(el[a]), reduced(el[b]), k(a, b));
            }
        }
    }
    Eigen::SparseMatrix<double> stiffness(n - 1, n - 1);
    stiffness.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(stiffness);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("stiffness factorization failed (disconnected mesh?)");
    }
    // A connected grounded Laplacian is positive definite.
    if ((ldlt.vectorD().array() <= 0.0).any()) {
        throw SolverError("stiffness matrix is singular (disconnected mesh?)");
    }

    const int ne = mesh.geometry.electrode_count;
    potentials_.reserve(ne);
    for (int k = 0; k < ne; ++k) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
        for (auto [node, w] : mesh.electrode_weights[k]) {
            if (node != ground) rhs[reduced(node)] += w;
        }
        const Eigen::VectorXd sol = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success || !sol.allFinite()) {
            throw SolverError("forward solve failed for electrode " + std::to_string(k));
        }
        Eigen::VectorXd u(n);
        for (int node = 0; node < n; ++node) {
            u[node] = node == ground ? 0.0 : sol[reduced(node)];
        }
        potentials_.push_back(std::move(u));
    }
}

Eigen::VectorXd ForwardSolver::pair_potential(int i, int j, double current) const {
    return current * (potentials_[i] - potentials_[j]);
}

double ForwardSolver::electrode_voltage(const Eigen::VectorXd& u, int k) const {
    double v = 0.0;
    for (auto [node, w] : mesh_->electrode_weights[k]) {
        v += w * u[node];
    }
    return v;
}

VoltageFrame ForwardSolver::frame(const PairSchedule& schedule, double current) const {
    VoltageFrame f;
    f.schedule = schedule;
    f.values.reserve(schedule.size());
    const int ne = mesh_->geometry.electrode_count;
    // Electrode-to-electrode transfer matrix: T(a, b) = voltage at a for unit current into b.
    Eigen::MatrixXd transfer(ne, ne);
    for (int b = 0; b < ne; ++b) {
        for (int a = 0; a < ne; ++a) {
            transfer(a, b) = electrode_voltage(potentials_[b], a);
        }
    }
    for (const auto& p : schedule.pairs()) {
        const int i = p.first, j = p.second;
        f.values.push_back(current * (transfer(i, i) - transfer(i, j) - transfer(j, i) +
                                      transfer(j, j)));
    }
    return f;
}

VoltageFrame forward_solve(const Mesh& mesh, const ConductivityField& field,
                           const PairSchedule& schedule, double current) {
    if (schedule.electrode_count() != mesh.geometry.electrode_count) {
        throw ConfigError("schedule electrode count does not match geometry");
    }
    return ForwardSolver(mesh, field).frame(schedule, current);
}

} // namespace eitfuse
