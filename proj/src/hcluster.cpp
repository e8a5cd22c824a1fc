#include "distresslab/hcluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "distresslab/errors.hpp"

namespace distress {

Linkage linkage_from_string(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "single" || s == "nearest") return Linkage::Single;
  if (s == "complete" || s == "farthest") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  if (s == "centroid") return Linkage::Centroid;
  if (s == "ward") return Linkage::Ward;
  fail(Errc::InvalidConfig, "unknown linkage '" + std::string(name) + "'");
}

const char* to_string(Linkage l) {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Centroid: return "centroid";
    case Linkage::Ward: return "ward";
  }
  return "single";
}

Matrix distance_matrix(const Matrix& points) {
  if (points.rows() < 2) fail(Errc::TooFewRows, "need at least 2 points");
  if (!points.all_finite()) fail(Errc::DimensionMismatch, "points contain non-finite values");
  const std::size_t n = points.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < points.cols(); ++c) {
        double diff = points(i, c) - points(j, c);
        s += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  return d;
}

namespace {

struct Active {
  int id;    // dendrogram cluster id
  int size;  // member count
};

// Lance-Williams update for the distance between the merged cluster (i u j)
// and cluster k. Centroid and Ward operate on squared distances.
double lance_williams(Linkage link, double dki, double dkj, double dij, int ni, int nj, int nk) {
  switch (link) {
    case Linkage::Single:
      return 0.5 * dki + 0.5 * dkj - 0.5 * std::fabs(dki - dkj);
    case Linkage::Complete:
      return 0.5 * dki + 0.5 * dkj + 0.5 * std::fabs(dki - dkj);
    case Linkage::Average: {
      double t = static_cast<double>(ni + nj);
      return (ni / t) * dki + (nj / t) * dkj;
    }
    case Linkage::Centroid: {
      double t = static_cast<double>(ni + nj);
      return (ni / t) * dki + (nj / t) * dkj - (ni * static_cast<double>(nj) / (t * t)) * dij;
    }
    case Linkage::Ward: {
      double t = static_cast<double>(ni + nj + nk);
      return ((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / t;
    }
  }
  return 0.0;
}

}  // namespace

Dendrogram agglomerate(const Matrix& dist, Linkage linkage) {
  if (dist.rows() != dist.cols() || dist.rows() < 2)
    fail(Errc::TooFewRows, "distance matrix must be square with at least 2 rows");
  const int n = static_cast<int>(dist.rows());

  const bool squared = (linkage == Linkage::Centroid || linkage == Linkage::Ward);

  // working distances between active clusters, indexed by slot
  std::vector<Active> active(n);
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    active[i] = {i, 1};
    for (int j = 0; j < n; ++j) d(i, j) = squared ? dist(i, j) * dist(i, j) : dist(i, j);
  }
  std::vector<int> slots(n);
  std::iota(slots.begin(), slots.end(), 0);

  Dendrogram out;
  out.n_leaves = n;
  out.merges.reserve(n - 1);

  for (int step = 0; step < n - 1; ++step) {
    // closest active pair, ties by smallest (min id, max id)
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a < slots.size(); ++a) {
      for (std::size_t b = a + 1; b < slots.size(); ++b) {
        double v = d(slots[a], slots[b]);
        int ida = active[slots[a]].id, idb = active[slots[b]].id;
        int lo = std::min(ida, idb), hi = std::max(ida, idb);
        if (v < best) {
          best = v;
          bi = a;
          bj = b;
        } else if (v == best) {
          int cl = std::min(active[slots[bi]].id, active[slots[bj]].id);
          int ch = std::max(active[slots[bi]].id, active[slots[bj]].id);
          if (lo < cl || (lo == cl && hi < ch)) {
            bi = a;
            bj = b;
          }
        }
      }
    }

    int si = slots[bi], sj = slots[bj];
    int ni = active[si].size, nj = active[sj].size;
    double dij = d(si, sj);

    double height = best;
    if (linkage == Linkage::Centroid) height = std::sqrt(best);
    if (linkage == Linkage::Ward) height = 0.5 * best;  // maintained value is 2x the ESS increase

    Merge m;
    m.left = std::min(active[si].id, active[sj].id);
    m.right = std::max(active[si].id, active[sj].id);
    m.height = height;
    m.size = ni + nj;
    out.merges.push_back(m);

    // merged cluster reuses slot si
    for (std::size_t a = 0; a < slots.size(); ++a) {
      int sk = slots[a];
      if (sk == si || sk == sj) continue;
      double updated = lance_williams(linkage, d(sk, si), d(sk, sj), dij, ni, nj, active[sk].size);
      d(sk, si) = updated;
      d(si, sk) = updated;
    }
    active[si] = {n + step, ni + nj};
    slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return out;
}

std::vector<int> cut(const Dendrogram& d, int k) {
  const int n = d.n_leaves;
  if (k < 1 || k > n) fail(Errc::InvalidK, "k = " + std::to_string(k) + " with n = " + std::to_string(n));

  // apply the first n-k merges with union-find over cluster ids
  std::vector<int> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < n - k; ++i) {
    int id = n + i;
    parent[find(d.merges[i].left)] = id;
    parent[find(d.merges[i].right)] = id;
  }

  // label components by smallest member leaf
  std::map<int, int> label_of;  // root -> label, keyed in leaf order
  std::vector<int> assign(n);
  int next = 0;
  for (int leaf = 0; leaf < n; ++leaf) {
    int root = find(leaf);
    auto it = label_of.find(root);
    if (it == label_of.end()) it = label_of.emplace(root, next++).first;
    assign[leaf] = it->second;
  }
  return assign;
}

std::string to_dot(const Dendrogram& d, const std::vector<std::string>& labels) {
  if (static_cast<int>(labels.size()) != d.n_leaves)
    fail(Errc::LabelCountMismatch, std::to_string(labels.size()) + " labels for " +
                                       std::to_string(d.n_leaves) + " leaves");
  std::ostringstream os;
  os << "digraph dendrogram {\n";
  os << "  node [shape=box];\n";
  for (int i = 0; i < d.n_leaves; ++i) os << "  n" << i << " [label=\"" << labels[i] << "\"];\n";
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    int id = d.n_leaves + static_cast<int>(m);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", d.merges[m].height);
    os << "  n" << id << " [label=\"h=" << buf << "\"];\n";
    os << "  n" << id << " -> n" << d.merges[m].left << ";\n";
    os << "  n" << id << " -> n" << d.merges[m].right << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace distress
