#ifndef PLATDIFF_ARCHIVE_IO_HPP
#define PLATDIFF_ARCHIVE_IO_HPP

#include <string>

#include "platdiff/sampler.hpp"

namespace platdiff::io {

// Newline-delimited JSON: one metadata record, then one record per draw.
void save_archive(const std::string& path, const sampler::DrawArchive& archive);

// Throws MissingArchive when the file is absent or not an archive.
sampler::DrawArchive load_archive(const std::string& path);

}  // namespace platdiff::io

#endif  // PLATDIFF_ARCHIVE_IO_HPP
