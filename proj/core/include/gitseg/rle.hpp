#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "gitseg/types.hpp"

namespace gitseg {

// Run-length text format of the annotation tables:
//
//   rle := "" | int " " int (" " int " " int)*
//
// Pairs are (start, length) with 1-indexed, row-major starts. Decoding is
// strict: any malformed input raises MalformedRle naming the token index.
// Adjacent runs are accepted; overlapping runs are rejected.

BinaryMask decode_rle(std::string_view rle, std::size_t width, std::size_t height);

/// Canonical encoding: maximal runs in ascending order, single-space
/// separated, empty string for a blank mask.
std::string encode_rle(const BinaryMask& mask);

}  // namespace gitseg
