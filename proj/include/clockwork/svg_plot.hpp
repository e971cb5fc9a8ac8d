#pragma once

#include <string>

namespace clockwork::svg {

/// Log-log plot of w1 (with CI bars) and bound_total against delta, read
/// from a w1 CSV.
void plot_w1_vs_delta(const std::string& csv_path, const std::string& svg_path);

/// One row per identity: relative residual (estimate - target) / |target|
/// with its CI, read from an identity CSV.
void plot_identity_forest(const std::string& csv_path, const std::string& svg_path);

}  // namespace clockwork::svg
