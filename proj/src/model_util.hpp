#pragma once

// Shared geometry helpers of the model builders.

#include "iga/multipatch.hpp"

#include <functional>
#include <optional>

namespace iga::detail {

/// Ruled patch between two curves running the same way; the order of the
/// two curves is chosen so that det J > 0.
NurbsPatch oriented(const NurbsCurve& a, const NurbsCurve& b);

/// Annular sector r_in <= r <= r_out, theta0 <= theta <= theta1.
NurbsPatch sector(double r_in, double r_out, double theta0, double theta1);

bool on_circle(const NurbsCurve& c, double radius, double rel_tol = 1e-9);
bool on_ray(const NurbsCurve& c, double angle, double tol = 1e-9);

/// Detects interfaces, then tags every remaining side with the classifier
/// result. Throws MismatchError for a side the classifier rejects (usually a
/// gap in the patch layout).
void classify_boundaries(MultiPatchDomain& d,
                         const std::function<std::optional<BoundaryTag>(const NurbsCurve&)>& classify);

}  // namespace iga::detail
