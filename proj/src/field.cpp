#include "pqs/field.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pqs/io_util.hpp"
#include "pqs/kernels.hpp"

namespace pqs {

double DiscreteField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

double DiscreteField::sup_distance(const DiscreteField& other) const {
    if (values.size() != other.values.size())
        throw std::invalid_argument("sup_distance: fields live on different meshes");
    return kernels::sup_abs_diff(values, other.values);
}

bool DiscreteField::dirichlet_ok(double tol) const {
    const std::size_t last = mesh->num_nodes() - 1;
    if (std::fabs(values[last]) > tol) return false;
    if (mesh->domain().kind == DomainKind::Interval && std::fabs(values[0]) > tol) return false;
    return true;
}

bool DiscreteField::nonnegative(double tol) const {
    for (double v : values)
        if (v < -tol) return false;
    return true;
}

void DiscreteField::write_csv(std::ostream& out) const {
    out << "index,x,d,u\n";
    const auto& x = mesh->nodes();
    const auto& d = mesh->distance_node();
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << io::shortest(x[i]) << ',' << io::shortest(d[i]) << ','
            << io::shortest(values[i]) << '\n';
}

}  // namespace pqs
