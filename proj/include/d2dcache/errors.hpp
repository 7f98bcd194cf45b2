#pragma once

#include <stdexcept>
#include <string>

namespace d2dcache {

/// Cross-validation asked for with fewer than two samples.
struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A link whose Monte-Carlo delay draw exceeded the hard frame cap.
struct pathological_link_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Greedy placement requested while every cache row is already full.
struct cache_full_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario configuration failed validation.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace d2dcache
