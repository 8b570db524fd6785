#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include "roaflow/boundary.hpp"

namespace roaflow {

/// Curve CSV: `idx,x1,x2`, one row per point.
void write_curve_csv(std::ostream& out, const BoundaryCurve& curve);
[[nodiscard]] BoundaryCurve read_curve_csv(std::istream& in);
void save_curve(const BoundaryCurve& curve, const std::filesystem::path& path);
[[nodiscard]] BoundaryCurve load_curve(const std::filesystem::path& path);

/// History CSV: `iter,idx,x1,x2,speed,E,status`.
void write_history_csv(std::ostream& out, std::span<const FlowSnapshot> history);

/// SVG overlay of the snapshot curves (solid) and an optional reference
/// polyline (dashed).
void write_svg(std::ostream& out, std::span<const FlowSnapshot> history,
               const std::optional<BoundaryCurve>& reference);

}  // namespace roaflow
