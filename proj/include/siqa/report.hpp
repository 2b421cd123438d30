#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "siqa/eval.hpp"

namespace siqa {

// Shortest round-trip decimal form with a guaranteed decimal point
// ("1.0", not "1"). All CSV/SVG output goes through this so reruns are
// byte-identical.
std::string fmt_double(double v);

// Writes metrics.csv, confusion.csv, mts_cdf.csv and SVG renderings of the
// confusion heatmap and the per-class CDF curves. Content is a pure function
// of the inputs (no timestamps). Classes with no CDF samples are omitted
// from the CDF outputs.
void render_report(const Metrics& metrics, const ConfusionMatrix& cm,
                   const std::array<std::vector<std::int64_t>, 3>& mts_sizes,
                   const std::filesystem::path& out_dir);

// Just the |M_TS| CDF outputs (mts_cdf.csv, mts_cdf.svg).
void render_cdf(const std::array<std::vector<std::int64_t>, 3>& mts_sizes,
                const std::filesystem::path& out_dir);

}  // namespace siqa
