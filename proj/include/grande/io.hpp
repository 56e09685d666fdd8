#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "grande/graph.hpp"
#include "grande/tensor.hpp"

namespace grande {

/// Raised for malformed input files; the message names the offending
/// byte offset or line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Loads a feature matrix from either format:
///   (a) headerless CSV of n rows x d numeric columns (an optional header
///       row is detected by a non-numeric first field);
///   (b) binary: magic "GRNDFEAT", then little-endian u64 n and d, then
///       n*d little-endian 64-bit reals, row-major.
/// The format is detected from the leading bytes. Matrices with fewer
/// than two rows are rejected (graphs need n >= 2).
DenseMatrix load_features(const std::string& path);

void save_features_binary(const std::string& path, const DenseMatrix& m);
void save_features_csv(const std::string& path, const DenseMatrix& m);

/// CSV of "node_index,class_index" lines covering every node exactly
/// once, with class indices contiguous from 0. Line order is irrelevant.
std::vector<int> load_labels(const std::string& path);
void save_labels_csv(const std::string& path, const std::vector<int>& labels);

/// One "i j" line per edge, i < j, sorted and duplicate-free.
void save_edge_list(const std::string& path, const NeighborGraph& g);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace grande
