#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ccdtvd {

/// Node counts of a tensor-product grid; unused trailing axes have one node.
/// Flat storage is x-fastest: index = i + nx * (j + ny * k).
struct GridShape {
    std::array<std::size_t, 3> nodes{1, 1, 1};

    std::size_t size() const noexcept { return nodes[0] * nodes[1] * nodes[2]; }
    std::size_t stride(int axis) const noexcept {
        return axis == 0 ? 1 : axis == 1 ? nodes[0] : nodes[0] * nodes[1];
    }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + nodes[0] * (j + nodes[1] * k);
    }
    std::array<std::size_t, 3> unflatten(std::size_t flat) const noexcept {
        return {flat % nodes[0], (flat / nodes[0]) % nodes[1], flat / (nodes[0] * nodes[1])};
    }
    bool operator==(const GridShape&) const = default;
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridShape shape, double fill = 0.0)
        : shape_(shape), values_(shape.size(), fill) {}

    const GridShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t flat) noexcept { return values_[flat]; }
    double operator[](std::size_t flat) const noexcept { return values_[flat]; }
    double& at(std::size_t i, std::size_t j = 0, std::size_t k = 0) {
        return values_.at(shape_.index(i, j, k));
    }
    double at(std::size_t i, std::size_t j = 0, std::size_t k = 0) const {
        return values_.at(shape_.index(i, j, k));
    }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// Velocity components on a common grid plus the time they represent.
struct FieldSet {
    std::vector<ScalarField> components;
    double time = 0.0;

    std::size_t dimension() const noexcept { return components.size(); }
};

FieldSet make_field_set(const GridShape& shape, int dimension, double time = 0.0);

/// y += a * x, componentwise. `time` is left untouched.
void axpy(FieldSet& y, double a, const FieldSet& x);
bool all_finite(const FieldSet& f);
double max_abs(const FieldSet& f);

}  // namespace ccdtvd
