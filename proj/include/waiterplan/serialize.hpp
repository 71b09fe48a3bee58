#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "waiterplan/poly_zonotope.hpp"

namespace waiterplan {

/// Versioned binary dump of named polynomial zonotopes ("WPZ1").
/// Little-endian; round-trips bit-exact.
void write_pz_dump(std::ostream& os,
                   const std::vector<std::pair<std::string, PolyZonotope>>& entries);
std::vector<std::pair<std::string, PolyZonotope>> read_pz_dump(std::istream& is);

void write_pz_dump_file(const std::string& path,
                        const std::vector<std::pair<std::string, PolyZonotope>>& entries);
std::vector<std::pair<std::string, PolyZonotope>> read_pz_dump_file(
    const std::string& path);

}  // namespace waiterplan
