#pragma once

// Patch exchange format (JSON). Layout:
//
//   {
//     "format": "igamach-patches", "version": 1,
//     "patches": [ { "degree": [pu, pv], "knots_u": [...], "knots_v": [...],
//                    "control_points": [[x, y], ...],   // u index fastest
//                    "weights": [...], "region": "iron" } ],
//     "interfaces": [ { "a": [patch, "east"], "b": [patch, "west"], "reversed": false } ],
//     "boundaries": [ { "patch": 0, "side": "south", "tag": "dirichlet" } ]
//   }
//
// "region" is optional; sides are south/east/north/west, tags as in tag_name().

#include "iga/multipatch.hpp"

#include <string>
#include <vector>

namespace iga {

std::string domain_to_json(const MultiPatchDomain& domain, const std::vector<std::string>& regions = {});

/// Parses and validates the document; regions are returned when requested.
MultiPatchDomain domain_from_json(const std::string& text, std::vector<std::string>* regions = nullptr);

void write_domain(const std::string& path, const MultiPatchDomain& domain,
                  const std::vector<std::string>& regions = {});
MultiPatchDomain read_domain(const std::string& path, std::vector<std::string>* regions = nullptr);

}  // namespace iga
