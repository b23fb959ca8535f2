#include "eitfuse/phantoms.hpp"

#include "eitfuse/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace eitfuse {

namespace {

constexpr double kTol = 1e-9;

double sum_forces(const std::vector<ContactSpec>& contacts) {
    double s = 0.0;
    for (const auto& c : contacts) s += c.force;
    return s;
}

bool inside_square(const ContactSpec& c, double half) {
    return std::abs(c.center.x) + c.radius <= half + kTol &&
           std::abs(c.center.y) + c.radius <= half + kTol;
}

bool overlaps(const ContactSpec& a, const ContactSpec& b) {
    return distance(a.center, b.center) < a.radius + b.radius - kTol;
}

} // namespace

void Scenario::validate(const SensorGeometry& geometry) const {
    const double half = geometry.half_side();
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        const auto& c = contacts[i];
        std::ostringstream where;
        where << "contact " << i << ": ";
        if (!(c.radius > 0.0)) throw ConfigError(where.str() + "radius must be positive");
        if (!(c.force >= 0.0)) throw ConfigError(where.str() + "force must be non-negative");
        if (!std::isfinite(c.delta_sigma)) throw ConfigError(where.str() + "delta_sigma not finite");
        if (!inside_square(c, half)) throw ConfigError(where.str() + "disk leaves the sensing square");
        for (std::size_t j = 0; j < i; ++j) {
            if (overlaps(c, contacts[j])) {
                where << "overlaps contact " << j;
                throw ConfigError(where.str());
            }
        }
    }
    if (total_force != sum_forces(contacts)) {
        throw ConfigError("scenario total force differs from the sum of contact forces");
    }
}

void PhantomConfig::validate() const {
    if (!(radius_min_units > 0.0) || radius_max_units < radius_min_units) {
        throw ConfigError("invalid radius range");
    }
    if (unit_scale_cm < 0.0) throw ConfigError("unit_scale_cm must be non-negative");
    if (!(conductivity_min > 0.0) || conductivity_max < conductivity_min) {
        throw ConfigError("invalid anomaly conductivity range");
    }
    if (!(total_force_min >= 0.0) || total_force_max < total_force_min) {
        throw ConfigError("invalid total force range");
    }
    if (!(coupling_kappa > 0.0)) throw ConfigError("coupling_kappa must be positive");
    if (rejection_budget < 1) throw ConfigError("rejection_budget must be positive");
}

double PhantomConfig::radius_min_cm(const SensorGeometry& g) const {
    return radius_min_units * (unit_scale_cm > 0.0 ? unit_scale_cm : g.half_side());
}

double PhantomConfig::radius_max_cm(const SensorGeometry& g) const {
    return radius_max_units * (unit_scale_cm > 0.0 ? unit_scale_cm : g.half_side());
}

Scenario sample_scenario(Rng& rng, int n_contacts, const SensorGeometry& geometry,
                         const PhantomConfig& config) {
    geometry.validate();
    config.validate();
    if (n_contacts < 1) throw ConfigError("n_contacts must be at least 1");
    const double half = geometry.half_side();
    const double rmin = config.radius_min_cm(geometry);
    const double rmax = config.radius_max_cm(geometry);
    if (rmax >= half) throw ConfigError("contact radius range does not fit in the square");

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    std::vector<ContactSpec> contacts;
    int attempts = 0;
    while (static_cast<int>(contacts.size()) < n_contacts) {
        if (attempts++ >= config.rejection_budget) {
            std::ostringstream msg;
            msg << "could not place " << n_contacts << " non-overlapping contacts within "
                << config.rejection_budget << " attempts";
            throw SamplingError(msg.str());
        }
        ContactSpec c;
        c.radius = uniform(rmin, rmax);
        const double reach = half - c.radius;
        c.center = {uniform(-reach, reach), uniform(-reach, reach)};
        const double level = uniform(config.conductivity_min, config.conductivity_max);
        const double sigma = config.conductivity_relative ? level * geometry.baseline_conductivity : level;
        c.delta_sigma = sigma - geometry.baseline_conductivity;
        bool clash = false;
        for (const auto& other : contacts) clash = clash || overlaps(c, other);
        if (!clash) contacts.push_back(c);
    }

    const double total = uniform(config.total_force_min, config.total_force_max);
    std::vector<double> weights;
    for (const auto& c : contacts) {
        weights.push_back(config.coupling == ForceCoupling::Proportional
                              ? std::abs(c.delta_sigma) * std::numbers::pi * c.radius * c.radius
                              : uniform(0.1, 1.0));
    }
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        contacts[i].force = wsum > 0.0 ? total * weights[i] / wsum : total / contacts.size();
    }
    return make_scenario(std::move(contacts));
}

ContactSpec contact_from_force(Point center, double radius, double force,
                               const SensorGeometry& geometry, const PhantomConfig& config) {
    if (!(radius > 0.0)) throw ConfigError("contact radius must be positive");
    if (!(force >= 0.0)) throw ConfigError("contact force must be non-negative");
    const double area = std::numbers::pi * radius * radius;
    ContactSpec c{center, radius, -force / (config.coupling_kappa * area), force};
    if (geometry.baseline_conductivity + c.delta_sigma <= 0.0) {
        throw ConfigError("contact force too large for the coupling: conductivity would vanish");
    }
    return c;
}

Scenario make_scenario(std::vector<ContactSpec> contacts) {
    Scenario s;
    s.total_force = sum_forces(contacts);
    s.contacts = std::move(contacts);
    return s;
}

ConductivityField contacts_to_field(const Mesh& mesh, const Scenario& scenario) {
    const double base = mesh.geometry.baseline_conductivity;
    std::vector<double> v(mesh.element_count(), base);
    for (std::size_t e = 0; e < v.size(); ++e) {
        const Point c = mesh.centroid(e);
        for (const auto& contact : scenario.contacts) {
            if (distance(c, contact.center) <= contact.radius) {
                v[e] = base + contact.delta_sigma;
                break;
            }
        }
    }
    return ConductivityField(std::move(v));
}

ConductivityImage ground_truth_image(const Scenario& scenario, const PixelGrid& grid) {
    ConductivityImage img(grid);
    for (std::size_t p = 0; p < img.values.size(); ++p) {
        const Point c = grid.center(p);
        for (const auto& contact : scenario.contacts) {
            if (distance(c, contact.center) <= contact.radius) {
                img.values[p] = std::abs(contact.delta_sigma);
                break;
            }
        }
    }
    return img;
}

} // namespace eitfuse
