#include "perilod/reference_table.hpp"

namespace perilod::harness {

const ReferenceTable& ReferenceTable::published() {
    // Rows: horizontal extent 10/20/30/40 deg; columns: vertical extent.
    static const ReferenceTable table{
        {10.0, 20.0, 30.0, 40.0},
        {{
            {4.147, 4.150, 4.058, 3.538},
            {3.721, 3.552, 3.398, 3.448},
            {3.601, 3.451, 2.876, 3.147},
            {3.808, 3.105, 3.281, 3.061},
        }},
        {{
            {0.921, 0.976, 0.965, 0.954},
            {0.973, 0.933, 0.982, 0.991},
            {0.973, 0.959, 0.946, 0.941},
            {0.991, 0.958, 0.926, 0.958},
        }},
        2.85,
        0.949,
    };
    return table;
}

double ReferenceTable::horizontal_marginal_s(int row) const {
    const auto& r = mean_time_s[static_cast<std::size_t>(row)];
    return (r[0] + r[1] + r[2] + r[3]) / 4.0;
}

double ReferenceTable::vertical_marginal_s(int col) const {
    const auto c = static_cast<std::size_t>(col);
    return (mean_time_s[0][c] + mean_time_s[1][c] + mean_time_s[2][c] + mean_time_s[3][c]) / 4.0;
}

} // namespace perilod::harness
