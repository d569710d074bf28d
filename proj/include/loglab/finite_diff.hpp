#pragma once

#include <string>
#include <utility>

#include "loglab/error.hpp"

namespace loglab {

// Central difference (fn(x+h) - fn(x-h)) / (2h). The step is the caller's
// responsibility; nothing here picks h adaptively.
template <class F>
double central_diff(F&& fn, double x, double h) {
    if (!(h > 0.0))
        fail(ErrorCode::ParamDomain,
             "central_diff step must be positive, got " + std::to_string(h));
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

}  // namespace loglab
