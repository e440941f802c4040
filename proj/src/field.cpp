#include "ccdtvd/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccdtvd {

FieldSet make_field_set(const GridShape& shape, int dimension, double time) {
    if (dimension < 1 || dimension > 3)
        throw std::invalid_argument("make_field_set: dimension must be 1, 2 or 3");
    FieldSet f;
    f.components.assign(static_cast<std::size_t>(dimension), ScalarField(shape));
    f.time = time;
    return f;
}

void axpy(FieldSet& y, double a, const FieldSet& x) {
    if (y.dimension() != x.dimension()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t c = 0; c < y.dimension(); ++c) {
        auto yv = y.components[c].values();
        auto xv = x.components[c].values();
        if (yv.size() != xv.size()) throw std::invalid_argument("axpy: shape mismatch");
        for (std::size_t n = 0; n < yv.size(); ++n) yv[n] += a * xv[n];
    }
}

bool all_finite(const FieldSet& f) {
    for (const auto& c : f.components)
        for (double v : c.values())
            if (!std::isfinite(v)) return false;
    return true;
}

double max_abs(const FieldSet& f) {
    double m = 0.0;
    for (const auto& c : f.components)
        for (double v : c.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace ccdtvd
