// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "hlcpe/grid.hpp"

namespace hlcpe {

/// One row per node: x,y[,z] followed by the components. Values carry 17
/// significant digits.
void write_csv(const Field2D& f, const Grid& g, const std::string& path,
               const std::vector<std::string>& names = {});
void write_csv(const Field3D& f, const Grid& g, const std::string& path,
               const std::vector<std::string>& names = {});

/// Raw float64 little-endian dump, row-major over (x, y[, z], component), with a
/// JSON header written next to it at `path + ".json"`.
void write_binary(const Field2D& f, const std::string& path);
void write_binary(const Field3D& f, const std::string& path);
Field2D read_binary2d(const std::string& path);
Field3D read_binary3d(const std::string& path);

}  // namespace hlcpe
