#include "pqs/domain.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pqs/io_util.hpp"

namespace pqs {

Domain Domain::interval(double length) {
    if (!(length > 0.0)) throw std::invalid_argument("interval length must be positive");
    return Domain{DomainKind::Interval, length, 1};
}

Domain Domain::ball(double radius, int dimension) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    if (dimension < 1) throw std::invalid_argument("ball dimension must be >= 1");
    return Domain{DomainKind::Ball, radius, dimension};
}

bool Domain::contains(double x) const {
    if (kind == DomainKind::Interval) return x >= 0.0 && x <= extent;
    return x >= 0.0 && x <= extent;  // radial coordinate
}

double Domain::distance(double x) const {
    if (!contains(x)) throw std::invalid_argument("coordinate outside the closed domain");
    if (kind == DomainKind::Interval) return std::min(x, extent - x);
    return extent - x;
}

Mesh::Mesh(Domain domain, std::size_t n, double grading)
    : domain_(domain), grading_(grading) {
    if (n < 1) throw std::invalid_argument("build_mesh: need at least one element");
    if (!(grading >= 1.0)) throw std::invalid_argument("build_mesh: grading must be >= 1");
    if (domain.kind == DomainKind::Interval && (n < 2 || n % 2 != 0))
        throw std::invalid_argument("build_mesh: interval meshes require an even element count");

    nodes_.resize(n + 1);
    if (domain.kind == DomainKind::Interval) {
        const double half = 0.5 * domain.extent;
        // graded on [0, l/2], mirrored exactly so the pattern is symmetric
        for (std::size_t i = 0; i <= n / 2; ++i)
            nodes_[i] = half * std::pow(2.0 * double(i) / double(n), grading);
        for (std::size_t i = n / 2 + 1; i <= n; ++i)
            nodes_[i] = domain.extent - nodes_[n - i];
        nodes_[n] = domain.extent;
    } else {
        // grading concentrated at r = R where the boundary layer sits
        const double R = domain.extent;
        for (std::size_t i = 0; i <= n; ++i)
            nodes_[i] = R - R * std::pow(1.0 - double(i) / double(n), grading);
        nodes_[0] = 0.0;
        nodes_[n] = R;
    }

    length_.resize(n);
    weight_.resize(n);
    mid_.resize(n);
    d_mid_.resize(n);
    d_node_.resize(n + 1);
    const int N = domain.dimension;
    for (std::size_t e = 0; e < n; ++e) {
        const double a = nodes_[e], b = nodes_[e + 1];
        length_[e] = b - a;
        if (!(length_[e] > 0.0)) throw std::invalid_argument("build_mesh: degenerate element");
        mid_[e] = 0.5 * (a + b);
        if (domain.kind == DomainKind::Interval || N == 1)
            weight_[e] = length_[e];
        else
            weight_[e] = (std::pow(b, N) - std::pow(a, N)) / double(N);
        d_mid_[e] = domain.distance(mid_[e]);
    }
    for (std::size_t i = 0; i <= n; ++i) d_node_[i] = domain.distance(nodes_[i]);
}

double Mesh::quadrature_weight(std::size_t element) const {
    if (element >= weight_.size()) throw std::out_of_range("quadrature_weight: bad element index");
    return weight_[element];
}

void Mesh::write_csv(std::ostream& out) const {
    out << "index,x,d\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        out << i << ',' << io::shortest(nodes_[i]) << ',' << io::shortest(d_node_[i]) << '\n';
}

MeshPtr build_mesh(const Domain& domain, std::size_t n, double grading) {
    return std::make_shared<Mesh>(domain, n, grading);
}

}  // namespace pqs
