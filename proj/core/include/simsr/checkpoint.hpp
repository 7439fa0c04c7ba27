#pragma once

#include "simsr/mlp.hpp"
#include "simsr/types.hpp"

#include <string>
#include <vector>

namespace simsr {

// Named group of tensors inside a checkpoint file. Format: magic
// "SIMSRBIN", u32 version, u32 section count; per section a length-prefixed
// name and tensor list; per tensor u32 rows, u32 cols, then row-major
// little-endian float64 payload.
struct CheckpointSection {
    std::string name;
    std::vector<Matrix> tensors;
};

void save_checkpoint(const std::string& path, const std::vector<CheckpointSection>& sections);
std::vector<CheckpointSection> load_checkpoint(const std::string& path);  // throws IoError

const CheckpointSection& find_section(const std::vector<CheckpointSection>& sections,
                                      const std::string& name);

// An MLP serializes as alternating W and b tensors (b as a column).
CheckpointSection section_of(const std::string& name, const Mlp& net);
Mlp mlp_from_section(const CheckpointSection& section);

}  // namespace simsr
