#pragma once

// A complete problem instance and the rigid motion that puts its supporting
// line on the x1-axis.

#include <optional>
#include <string>
#include <vector>

#include "twoweight/geometry.hpp"
#include "twoweight/measure.hpp"
#include "twoweight/transform.hpp"

namespace tw {

enum class LineRole { None, Sigma, Omega, Both };

const char* to_string(LineRole role);
LineRole line_role_from_string(const std::string& s);

/// A finite family of translated dyadic grids sharing level bounds. Each grid
/// is rooted at its level_min cube containing `anchor` (default: the centre
/// of the bounding box of both supports).
struct GridFamily {
  int level_min = 0;
  int level_max = 8;
  std::vector<Point> shifts;
  std::optional<Point> anchor;
};

/// 2^n shifts: axis 1 takes {0, 1/12}, the other axes take {1/2, 5/12}. The
/// non-dyadic offsets keep the x1-axis off the cube faces in half the grids.
std::vector<Point> default_grid_shifts(int n);

struct Scenario {
  int n = 2;
  double alpha = 0.0;
  DiscreteMeasure sigma{2};
  DiscreteMeasure omega{2};
  std::optional<LineSpec> line;
  LineRole line_role = LineRole::None;
  GoodnessParams goodness;
  GridFamily grids;
  std::optional<Truncation> truncation;
  double c_norm = 1.0;
  /// WBP comparability constant; 0 selects 2^r.
  double wbp_comparability = 0.0;
  int flipped_component = -1;

  /// Full consistency check; throws ValidationError.
  void validate() const;
  KernelParams kernel() const;
  /// The override if present, else default_truncation.
  Truncation effective_truncation() const;
  /// One GridPtr per shift (default_grid_shifts when none are configured).
  std::vector<GridPtr> build_grids() const;
  double wbp_constant_c() const;
};

/// Rigid motion x -> U x - (0, (U p)') taking the flagged line to the x1-axis,
/// applied to both measures (and to an explicit grid anchor). U is the
/// Householder reflection sending the direction to e1, composed with a sign
/// flip of the last axis so that det U = +1; U = I when the direction is e1.
/// Atoms of the flagged measure(s) have their transverse coordinates set to
/// exactly zero afterwards.
Scenario canonicalize_line(const Scenario& s);

}  // namespace tw
