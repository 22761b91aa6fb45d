#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "rtms/gather.hpp"
#include "rtms/grid.hpp"

namespace rtms {

// Field file: "RTMF" | version u32 | nx1 u32 | nx2 u32 | dx f64 | origin x1 f64 | origin x2 f64,
// then nx1*nx2 little-endian f64 with x1 fastest.
inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 40;

// Gather file: "RTMG" | nt u32 | nrec u32 | dt f64 | x1_first f64 | dx_rec f64, then nt*nrec f64
// row-major (one row per time sample).
inline constexpr std::size_t kGatherHeaderBytes = 36;

void write_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field(const std::filesystem::path& path);

void write_gather(const std::filesystem::path& path, const SurfaceGather& g);
SurfaceGather read_gather(const std::filesystem::path& path);

/// Writes a 0/1 mask in the field format.
void write_mask(const std::filesystem::path& path, const MaskField& m);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace rtms
