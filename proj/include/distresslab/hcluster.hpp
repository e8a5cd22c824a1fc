#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "distresslab/matrix.hpp"

namespace distress {

// The five agglomeration rules, each one Lance-Williams update.
enum class Linkage { Single, Complete, Average, Centroid, Ward };

Linkage linkage_from_string(std::string_view name);
const char* to_string(Linkage l);

struct Merge {
  int left;       // smaller cluster id
  int right;      // larger cluster id
  double height;  // fusion height (Ward: ESS increase; Centroid: centroid distance)
  int size;       // members in the new cluster
};

// Leaf ids 0..n-1, internal ids n..2n-2 in merge order.
struct Dendrogram {
  int n_leaves = 0;
  std::vector<Merge> merges;  // exactly n-1
};

// Symmetric Euclidean distances, zero diagonal.
Matrix distance_matrix(const Matrix& points);

// Iteratively fuses the closest pair; ties broken by smallest (left, right)
// id pair. Inter-cluster distances maintained by the Lance-Williams
// recurrence of the chosen linkage.
Dendrogram agglomerate(const Matrix& dist, Linkage linkage);

// Undo the last k-1 merges; labels 0..k-1 ordered by smallest member index.
std::vector<int> cut(const Dendrogram& d, int k);

// DOT rendering of the merge tree with heights as node annotations.
std::string to_dot(const Dendrogram& d, const std::vector<std::string>& labels);

}  // namespace distress
