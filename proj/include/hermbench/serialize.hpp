#pragma once

#include <string>

#include "hermbench/fields.hpp"

namespace hermbench {

/// Self-describing JSON containers with explicit shape metadata. Doubles are
/// emitted with a shortest round-trip representation, so read(write(x)) is
/// floating-point exact.
std::string geometry_to_json(const GridGeometry& g);
GeometryPtr geometry_from_json(const std::string& text);

std::string field_to_json(const MatrixField& f);
MatrixField field_from_json(const std::string& text);

std::string scalar_to_json(const GeometryPtr& geom, const ScalarField& f);
ScalarField scalar_from_json(const std::string& text, GeometryPtr* geom_out = nullptr);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hermbench
