#include "localmap/architecture.hpp"

#include "localmap/error.hpp"

namespace localmap {

std::string_view style_name(ArchStyle s) {
  return s == ArchStyle::NvdlaLike ? "nvdla" : "eyeriss";
}

std::optional<Count> capacity_words(const MemoryLevel& level, Count word_bits) {
  if (level.unbounded) return std::nullopt;
  return checked_mul(level.depth, level.width) / word_bits;
}

std::vector<PeCoord> fed_pes(const AcceleratorSpec& spec, int level_index,
                             Count bank_index) {
  if (level_index < 0 || level_index >= spec.num_levels()) {
    throw ModelError("level index " + std::to_string(level_index) +
                     " out of range");
  }
  const PEArray& pe = spec.pe;
  std::vector<PeCoord> out;
  if (level_index == 0) {
    if (bank_index >= pe.total()) {
      throw ModelError("L0 bank index " + std::to_string(bank_index) +
                       " out of range");
    }
    out.push_back({bank_index / pe.n, bank_index % pe.n});
    return out;
  }
  const MemoryLevel& level = spec.levels[level_index];
  if (bank_index >= level.bank_count) {
    throw ModelError("bank index " + std::to_string(bank_index) +
                     " out of range for level " + level.name);
  }
  if (spec.style == ArchStyle::EyerissLike && level_index == 1) {
    for (Count r = 0; r < pe.m; ++r) out.push_back({r, bank_index});
    return out;
  }
  for (Count r = 0; r < pe.m; ++r)
    for (Count c = 0; c < pe.n; ++c) out.push_back({r, c});
  return out;
}

Count physical_instances(const AcceleratorSpec& spec, int level_index) {
  if (level_index == 0) return spec.pe.total();
  return spec.levels[level_index].bank_count;
}

std::vector<std::string> validate_spec(const AcceleratorSpec& spec) {
  std::vector<std::string> errs;
  if (spec.word_bits == 0) errs.push_back("word_bits must be >= 1");
  if (spec.pe.m == 0 || spec.pe.n == 0) errs.push_back("PE array must be at least 1x1");
  if (spec.mac_energy < 0) errs.push_back("mac_energy must be >= 0");
  if (spec.levels.size() < 2) {
    errs.push_back("need at least one on-chip level and DRAM");
    return errs;
  }

  int unbounded = 0;
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    const MemoryLevel& l = spec.levels[i];
    const std::string tag = "level " + std::to_string(i) + " (" + l.name + ")";
    if (l.unbounded) {
      ++unbounded;
      if (i + 1 != spec.levels.size()) errs.push_back(tag + ": only the outermost level may be unbounded");
    } else if (l.depth == 0) {
      errs.push_back(tag + ": depth must be >= 1");
    }
    if (l.width == 0) errs.push_back(tag + ": width must be >= 1");
    if (l.bank_count == 0) errs.push_back(tag + ": bank count must be >= 1");
    if (l.energy_per_access < 0) errs.push_back(tag + ": energy must be >= 0");
    if (!l.unbounded && spec.word_bits > 0 && l.depth * l.width < spec.word_bits)
      errs.push_back(tag + ": smaller than one word");
  }
  if (unbounded != 1) errs.push_back("exactly one unbounded level required, found " + std::to_string(unbounded));
  if (!spec.levels.back().unbounded) errs.push_back("outermost level must be unbounded DRAM");

  const int onchip = spec.num_onchip_levels();
  if (spec.style == ArchStyle::NvdlaLike) {
    if (onchip != 2) errs.push_back("NVDLA-like spec needs exactly 2 on-chip levels, found " + std::to_string(onchip));
    for (int i = 0; i < std::min(onchip, 2); ++i)
      if (spec.levels[i].bank_count != 1) errs.push_back("NVDLA-like level " + std::to_string(i) + " must have a single bank");
  } else {
    if (onchip != 3) errs.push_back("Eyeriss-like spec needs exactly 3 on-chip levels, found " + std::to_string(onchip));
    if (spec.levels[0].bank_count != 1) errs.push_back("Eyeriss-like L0 must have a single bank per PE");
    if (onchip >= 2 && spec.levels[1].bank_count != spec.pe.n)
      errs.push_back("Eyeriss-like L1 bank count " + std::to_string(spec.levels[1].bank_count) +
                     " must equal PE columns " + std::to_string(spec.pe.n));
    if (onchip >= 3 && spec.levels[2].bank_count != 1) errs.push_back("Eyeriss-like L2 must have a single bank");
  }
  return errs;
}

int spatial_x_boundary(const AcceleratorSpec& spec) {
  return spec.style == ArchStyle::EyerissLike ? 1 : 0;
}

int spatial_y_boundary(const AcceleratorSpec&) { return 0; }

}  // namespace localmap
