#pragma once

#include <filesystem>
#include <iosfwd>

#include "tscaledgd/tensor3.hpp"

namespace tsgd {

// TSR3 layout: magic "TSR3", dims n1 n2 n3 as little-endian u32, then
// little-endian f64 entries with k outermost, then i, then j.

void write_tsr3(std::ostream& out, const Tensor3& a);
Tensor3 read_tsr3(std::istream& in);

void write_tsr3(const std::filesystem::path& path, const Tensor3& a);
Tensor3 read_tsr3(const std::filesystem::path& path);

}  // namespace tsgd
