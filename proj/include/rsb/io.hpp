#pragma once

#include <map>
#include <string>

#include "rsb/dataset.hpp"
#include "rsb/posterior.hpp"

namespace rsb {

using ConfigMap = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment.
ConfigMap read_config_file(const std::string& path);

// Header row required: y, x1..xp, optional offset, lon, lat.
CountDataset read_count_csv(const std::string& path);
void write_count_csv(const std::string& path, const CountDataset& data);

void write_draws_csv(const std::string& path, const PosteriorDraws& draws);
void write_summary(const std::string& path, const PosteriorDraws& draws);

std::string format_double(double v);

}  // namespace rsb
