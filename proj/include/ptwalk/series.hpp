#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ptwalk/errors.hpp"

namespace ptwalk::measures {

/// Per-point status bits of a MeasureSeries.
enum PointStatus : std::uint8_t {
    kOk = 0,
    kPinvUsed = 1,   // intermediate map required a pseudo-inverse
    kBeyondEp = 2,   // eigenvalue magnitude outside [0, 1 + 1e-8]
    kNonFinite = 4,
};

/// Time-indexed record of a scalar diagnostic.
struct MeasureSeries {
    std::string label;
    std::vector<int> times;
    std::vector<double> values;
    std::vector<std::uint8_t> status;

    void push(int t, double v, std::uint8_t s = kOk) {
        if (!times.empty() && t <= times.back())
            throw Error("MeasureSeries: times must be strictly increasing");
        if (!std::isfinite(v)) s |= kNonFinite;
        times.push_back(t);
        values.push_back(v);
        status.push_back(s);
    }

    size_t size() const { return times.size(); }
};

} // namespace ptwalk::measures
