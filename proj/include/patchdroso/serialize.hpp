#pragma once

#include <iosfwd>
#include <string>

#include "patchdroso/ensemble.hpp"

namespace droso {

// Flat little-endian binary dumps. Weights are written as raw IEEE-754
// bytes, so save -> load -> save reproduces the file bit-exactly.

void save_unit(const DrosoNet& model, std::ostream& out);
DrosoNet load_unit(std::istream& in);

void save_unit(const DrosoNet& model, const std::string& path);
DrosoNet load_unit(const std::string& path);

void save_ensemble(const PatchEnsemble& ensemble, const std::string& path);
PatchEnsemble load_ensemble(const std::string& path);

}  // namespace droso
