#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/estimator.hpp"
#include "dendro/spanning_tree.hpp"

namespace dendro::io {

/// CSV layout: first row holds n, then one `i,j,value` row per pair with
/// 1-based i < j. Every pair must appear exactly once. Throws InvalidInput.
Dissimilarity read_dissimilarity_csv(std::istream& in);
Dissimilarity read_dissimilarity_csv(const std::filesystem::path& path);
void write_dissimilarity_csv(std::ostream& out, const Dissimilarity& d);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Leaf sets are sorted arrays of 1-based labels.
nlohmann::json to_json(const Structure& s);
/// `{ "merges": [[leafset, leafset], ...], "heights": [...] }`
nlohmann::json to_json(const Dendrogram& d);
/// `[[i, j], ...]`, 1-based.
nlohmann::json to_json(const SpanningTree& t);
nlohmann::json to_json(const EstimateReport& report);

/// n is the largest label seen. Throws InvalidInput on malformed documents.
Structure structure_from_json(const nlohmann::json& j);
Dendrogram dendrogram_from_json(const nlohmann::json& j);
SpanningTree spanning_tree_from_json(const nlohmann::json& j, std::size_t n);

}  // namespace dendro::io
