#include "eitfuse/errors.hpp"
#include "eitfuse/forward.hpp"
#include "eitfuse/phantoms.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace eitfuse;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Independent oracle: the same P1 problem written as a resistor network with
// cotangent edge conductances, solved densely with the mean potential pinned
// to zero instead of grounding a node.
std::vector<double> resistor_network_frame(const Mesh& mesh, const ConductivityField& field,
                                           const PairSchedule& schedule) {
    const int n = static_cast<int>(mesh.node_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& t = mesh.elements[e];
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
            const Point pa = mesh.nodes[a], pb = mesh.nodes[b], pc = mesh.nodes[c];
            // Angle at c, opposite edge ab.
            const double ux = pa.x - pc.x, uy = pa.y - pc.y, vx = pb.x - pc.x, vy = pb.y - pc.y;
            const double cot = (ux * vx + uy * vy) / std::abs(ux * vy - uy * vx);
            const double g = 0.5 * field[e] * cot;
            L(a, a) += g;
            L(b, b) += g;
            L(a, b) -= g;
            L(b, a) -= g;
        }
    }
    for (int i = 0; i < n; ++i) {
        L(n, i) = 1.0;
        L(i, n) = 1.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    std::vector<double> out;
    for (const ElectrodePair& p : schedule.pairs()) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
        for (const auto& [node, w] : mesh.electrode_weights[p.first]) rhs[node] += w;
        for (const auto& [node, w] : mesh.electrode_weights[p.second]) rhs[node] -= w;
        const Eigen::VectorXd u = lu.solve(rhs);
        double vi = 0.0, vj = 0.0;
        for (const auto& [node, w] : mesh.electrode_weights[p.first]) vi += w * u[node];
        for (const auto& [node, w] : mesh.electrode_weights[p.second]) vj += w * u[node];
        out.push_back(vi - vj);
    }
    return out;
}

Scenario one_disk(Point c, double r, double ds) { return make_scenario({{c, r, ds, 1.0}}); }

} // namespace

TEST_SUITE("forward") {

TEST_CASE("pair schedule sizes and ordering") {
    CHECK(PairSchedule::all_pairs(16).size() == 120);
    CHECK(PairSchedule::all_pairs(4).size() == 6);
    CHECK(PairSchedule::all_pairs(2).size() == 1);
    CHECK_THROWS_AS(PairSchedule::all_pairs(1), ConfigError);
    const auto s = PairSchedule::all_pairs(16);
    CHECK(s[0] == ElectrodePair{0, 1});
    CHECK(s[15] == ElectrodePair{1, 2});
    CHECK(s[119] == ElectrodePair{14, 15});
    for (std::size_t m = 0; m < s.size(); ++m) {
        CHECK(s.index_of(s[m].first, s[m].second) == m);
        CHECK(s.index_of(s[m].second, s[m].first) == m);
    }
}

TEST_CASE("homogeneous frame is invariant under the square's symmetries") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 41);
    const auto s = PairSchedule::all_pairs(16);
    const VoltageFrame f = forward_solve(mesh, ConductivityField::uniform(mesh.element_count(), 1.0), s);
    double worst_rot = 0.0, worst_mir = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m) {
        const int i = s[m].first, j = s[m].second;
        worst_rot = std::max(worst_rot, rel_diff(f.values[m], f.values[s.index_of((i + 4) % 16, (j + 4) % 16)]));
        // Mirror x -> -x reverses the counter-clockwise order: k -> 3 - k.
        worst_mir = std::max(worst_mir,
                             rel_diff(f.values[m], f.values[s.index_of((19 - i) % 16, (19 - j) % 16)]));
    }
    CHECK(worst_rot <= 1e-10);
    CHECK(worst_mir <= 1e-10);
}

TEST_CASE("scaling the conductivity by k scales voltages by 1/k") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 21);
    const auto s = PairSchedule::all_pairs(16);
    const ConductivityField field =
        contacts_to_field(mesh, one_disk({1.0, -2.0}, 1.2, -0.4));
    const VoltageFrame f = forward_solve(mesh, field, s);
    for (double k : {0.5, 3.0, 1e3}) {
        const VoltageFrame g = forward_solve(mesh, field.scaled(k), s);
        for (std::size_t m = 0; m < s.size(); ++m) CHECK(rel_diff(g.values[m] * k, f.values[m]) <= 1e-12);
    }
}

TEST_CASE("transfer reciprocity") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 21);
    const ForwardSolver solver(mesh, contacts_to_field(mesh, one_disk({-2.0, 1.0}, 1.0, -0.3)));
    for (int k = 0; k < 16; ++k)
        for (int l = 0; l < 16; ++l) {
            const double a = solver.electrode_voltage(solver.electrode_potential(k), l);
            const double b = solver.electrode_voltage(solver.electrode_potential(l), k);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1.0));
        }
}

TEST_CASE("frames agree with a resistor-network oracle") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 11);
    const auto s = PairSchedule::all_pairs(16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    std::vector<double> values(mesh.element_count());
    for (double& v : values) v = u(rng);
    const ConductivityField field(values);
    const VoltageFrame f = forward_solve(mesh, field, s);
    const std::vector<double> oracle = resistor_network_frame(mesh, field, s);
    for (std::size_t m = 0; m < s.size(); ++m) CHECK(rel_diff(f.values[m], oracle[m]) <= 1e-9);
}

TEST_CASE("lowering conductivity never lowers a two-terminal resistance") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 11);
    const auto s = PairSchedule::all_pairs(16);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::uniform_int_distribution<std::size_t> pick(0, mesh.element_count() - 1);
    std::vector<double> values(mesh.element_count());
    for (double& v : values) v = u(rng);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> lowered = values;
        for (int k = 0; k < 5; ++k) lowered[pick(rng)] *= 0.5;
        const auto before = resistor_network_frame(mesh, ConductivityField(values), s);
        const auto after = resistor_network_frame(mesh, ConductivityField(lowered), s);
        const auto after_fem = forward_solve(mesh, ConductivityField(lowered), s).values;
        for (std::size_t m = 0; m < s.size(); ++m) {
            CHECK(after[m] >= before[m] - 1e-12);
            CHECK(rel_diff(after[m], after_fem[m]) <= 1e-9);
        }
    }
}

TEST_CASE("disk near electrode 1 is seen most by the pair next to it") {
    for (int n : {11, 41, kDefaultNodesPerSide}) {
        const Mesh mesh = build_mesh(SensorGeometry{}, n);
        const auto s = PairSchedule::all_pairs(16);
        const Point e1 = mesh.geometry.electrode_center(1);
        const Point e2 = mesh.geometry.electrode_center(2);
        const Point near{(e1.x + e2.x) / 2, e1.y + 1.2};
        const VoltageFrame base = forward_solve(mesh, ConductivityField::uniform(mesh.element_count(), 1.0), s);
        const VoltageFrame with = forward_solve(mesh, contacts_to_field(mesh, one_disk(near, 0.9, -0.5)), s);
        const double dv_near = std::abs(with.values[s.index_of(1, 2)] - base.values[s.index_of(1, 2)]);
        const double dv_far = std::abs(with.values[s.index_of(9, 10)] - base.values[s.index_of(9, 10)]);
        CHECK(dv_near > dv_far);
    }
}

TEST_CASE("refinement from the operating density changes frames by less than 2%") {
    const auto s = PairSchedule::all_pairs(16);
    const Mesh coarse = build_mesh(SensorGeometry{}, kDefaultNodesPerSide);
    const Mesh fine = build_mesh(SensorGeometry{}, 2 * kDefaultNodesPerSide - 1);
    const Scenario sc = one_disk({1.0, 1.5}, 1.0, -0.3);
    const VoltageFrame a = forward_solve(coarse, contacts_to_field(coarse, sc), s);
    const VoltageFrame b = forward_solve(fine, contacts_to_field(fine, sc), s);
    double worst = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m) worst = std::max(worst, rel_diff(a.values[m], b.values[m]));
    CHECK(worst < 0.02);
}

TEST_CASE("input validation") {
    const Mesh mesh = build_mesh(SensorGeometry{}, 11);
    CHECK_THROWS_AS(ConductivityField(std::vector<double>{1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(ConductivityField(std::vector<double>{1.0, NAN}), ConfigError);
    CHECK_THROWS_AS(ForwardSolver(mesh, ConductivityField::uniform(3, 1.0)), ConfigError);
    VoltageFrame f{PairSchedule::all_pairs(16), std::vector<double>(119, 0.0)};
    CHECK_THROWS_AS(f.validate(), ConfigError);
}

} // TEST_SUITE
