#pragma once

#include <string>

#include "vsseq/records.hpp"

namespace vsseq {

// Manifest: JSON with "stations" and "records" arrays. Record channel data is
// either inline ("channels": [[...],[...],[...]]) or external ("data_file":
// path relative to the manifest, little-endian float32, shape [3 x n],
// channel-major). Validates the loaded dataset before returning.
Dataset load_dataset(const std::string& manifest_path);

// inline_channels = false writes one "waves/<record_id>.f32" per record next
// to the manifest. Output bytes are deterministic for a given dataset.
void write_dataset(const Dataset& ds, const std::string& manifest_path,
                   bool inline_channels = false);

}  // namespace vsseq
