#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

namespace pqs {

enum class DomainKind { Interval, Ball };

/// Computational domain: an interval (0, length) or a ball of radius R,
/// the two geometries where the boundary distance is available in closed
/// form.
struct Domain {
    DomainKind kind = DomainKind::Interval;
    double extent = 1.0;  // length of the interval, or radius of the ball
    int dimension = 1;

    static Domain interval(double length);
    static Domain ball(double radius, int dimension);

    /// Distance to the boundary; throws if x lies outside the closed domain.
    double distance(double x) const;

    bool contains(double x) const;

    double diameter() const { return kind == DomainKind::Ball ? 2.0 * extent : extent; }
};

/// Boundary-graded 1D mesh. Interval meshes are symmetric about the
/// midpoint; ball meshes grade toward r = R. All per-element data
/// (lengths, quadrature weights, midpoints, midpoint boundary distances)
/// is precomputed; the mesh is immutable afterwards.
class Mesh {
public:
    Mesh(Domain domain, std::size_t n, double grading);

    const Domain& domain() const { return domain_; }
    double grading() const { return grading_; }

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_elements() const { return nodes_.size() - 1; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& element_length() const { return length_; }
    const std::vector<double>& element_weight() const { return weight_; }
    const std::vector<double>& element_mid() const { return mid_; }
    const std::vector<double>& distance_mid() const { return d_mid_; }
    const std::vector<double>& distance_node() const { return d_node_; }

    /// Quadrature weight of one element: the element length on an
    /// interval, or the integral of r^{N-1} over the element on a ball
    /// (surface constant normalised to 1).
    double quadrature_weight(std::size_t element) const;

    /// Nodes with a Dirichlet constraint are excluded from the free
    /// range. Interval: both endpoints. Ball: only r = R; the centre is
    /// a free node whose no-flux condition is natural in the quadrature.
    std::size_t free_begin() const { return domain_.kind == DomainKind::Interval ? 1 : 0; }
    std::size_t free_end() const { return nodes_.size() - 1; }

    /// One row per node: index,x,d(x).
    void write_csv(std::ostream& out) const;

private:
    Domain domain_;
    double grading_;
    std::vector<double> nodes_;
    std::vector<double> length_;
    std::vector<double> weight_;
    std::vector<double> mid_;
    std::vector<double> d_mid_;
    std::vector<double> d_node_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// n = element count; interval meshes require n even so the graded node
/// pattern can be mirrored exactly. grading = 1 is uniform.
MeshPtr build_mesh(const Domain& domain, std::size_t n, double grading);

}  // namespace pqs
