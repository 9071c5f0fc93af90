#pragma once

#include <array>

namespace perilod::harness {

/// Bundled reference data: mean search times (seconds) and fraction of
/// correct trials for the 4x4 grid of inset extents plus the undegraded
/// display, measured with eight subjects on the Flight Helmet HMD
/// (target-present trials). Row index = horizontal extent, column index =
/// vertical extent, extents 10/20/30/40 degrees.
struct ReferenceTable {
    std::array<double, 4> extents_deg;
    std::array<std::array<double, 4>, 4> mean_time_s;
    std::array<std::array<double, 4>, 4> accuracy;
    double undegraded_mean_time_s;
    double undegraded_accuracy;

    /// The published dataset, verbatim.
    static const ReferenceTable& published();

    /// Marginal mean over one row (fixed horizontal extent).
    double horizontal_marginal_s(int row) const;
    /// Marginal mean over one column (fixed vertical extent).
    double vertical_marginal_s(int col) const;
};

} // namespace perilod::harness
