#pragma once

#include <functional>
#include <span>

#include "asdep/linalg.hpp"

namespace asdep {

// Scalar model M : R^d -> R. Must be safe to call concurrently.
using Model = std::function<double(std::span<const double>)>;

// Ordinary gradient of a model, grad M : R^d -> R^d.
using GradientFn = std::function<Vector(std::span<const double>)>;

}  // namespace asdep
