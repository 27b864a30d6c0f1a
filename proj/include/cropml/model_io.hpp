#ifndef CROPML_MODEL_IO_HPP
#define CROPML_MODEL_IO_HPP

#include <string>

#include "cropml/models.hpp"

namespace cropml {

// JSON model file, format_version 1. Trees are stored as flat arrays of
// {feature_index, threshold, left, right, value} records with the root at
// index 0 and leaves marked by feature_index = -1. The file carries the
// fitted payload, the area/item encoders (needed to score raw CSV rows) and
// an FNV-1a checksum over the rest of the document.
void save_model(const TrainedModel& model, const std::string& path);

// Throws DataError on version mismatch, checksum failure or a malformed
// file; never returns a partial model.
TrainedModel load_model(const std::string& path);

} // namespace cropml

#endif
