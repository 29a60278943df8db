#pragma once

#include <string>

#include "dks/instance.hpp"

namespace dks {

// Serializes an instance to the versioned JSON document described in the
// README (format_version 1). Weights are written with 17 significant
// digits so save/load round-trips bit-exactly.
std::string instance_to_text(const PlantedInstance& instance);
void save_instance(const PlantedInstance& instance, const std::string& path);

// Parses and validates an instance document. Syntax problems carry a line
// number, semantic problems the offending field; format_version mismatch
// raises VersionError. The pre-deletion cross/outer edge logs are
// reconstructed from the surviving edges plus the adversary log.
PlantedInstance instance_from_text(const std::string& text);
PlantedInstance load_instance(const std::string& path);

// Shared formatting helper: shortest decimal with 17 significant digits.
std::string format_real(double value);

}  // namespace dks
