#pragma once

#include <iosfwd>
#include <vector>

#include "pqs/domain.hpp"

namespace pqs {

/// Piecewise-linear nodal field on a mesh. Dirichlet fields vanish at the
/// constrained nodes (both interval endpoints; the node at r = R on a ball).
struct DiscreteField {
    MeshPtr mesh;
    std::vector<double> values;

    DiscreteField() = default;
    explicit DiscreteField(MeshPtr m) : mesh(std::move(m)), values(mesh->num_nodes(), 0.0) {}
    DiscreteField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {}

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    double sup_norm() const;
    double sup_distance(const DiscreteField& other) const;

    bool dirichlet_ok(double tol = 0.0) const;
    bool nonnegative(double tol = 0.0) const;

    /// One row per node: index,x,d(x),u.
    void write_csv(std::ostream& out) const;
};

}  // namespace pqs
