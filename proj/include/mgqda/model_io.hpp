#pragma once

#include <mgqda/classifier.hpp>

#include <filesystem>
#include <string>

namespace mgqda {

inline constexpr int kModelFormatVersion = 1;

/*
 * JSON document with fields format_version, p_full, g_count, labels,
 * priors, support (0-based), group_supports, omega_s (flat, row-major),
 * means_s, cov_s (lower triangle, row-major), alpha, lambda, cov_mode and
 * optional feature_names. Reals are written with 17 significant digits so
 * a reload reproduces every value bit for bit.
 */
std::string model_to_json(const FittedModel& model);

/// Throws InvalidInput on malformed documents or unsupported versions.
FittedModel model_from_json(const std::string& text);

void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

} // namespace mgqda
