#pragma once

// CSV exchange for panels: `hypothesis,time,value` (one row per cell) plus a
// sidecar `hypothesis,is_null` holding the truth labels.

#include <iosfwd>

#include "carefree/panel.hpp"

namespace carefree {

void write_panel_csv(const EProcessPanel& panel, std::ostream& out);
void write_truth_csv(const TruthLabels& truth, std::ostream& out);

/// Reads both files back. Every (hypothesis, time) cell of a dense K x (T+1)
/// grid must appear exactly once; is_null accepts 0/1/true/false. Throws
/// std::runtime_error naming the offending line on malformed input.
EProcessPanel read_panel_csv(std::istream& values, std::istream& truth);

}  // namespace carefree
