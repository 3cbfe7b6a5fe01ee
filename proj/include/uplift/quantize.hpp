#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uplift/dataset.hpp"

namespace uplift {

// Cell counts of a candidate split; group order is left-treated,
// left-control, right-treated, right-control.
struct GroupCounts {
  std::uint64_t n[4] = {0, 0, 0, 0};
  std::uint64_t resp[4] = {0, 0, 0, 0};
};

struct SplitTest {
  double z = 0.0;
  double p = 1.0;
};

// Two-sided test of equal uplift on both sides of a cut, normal approximation
// to the hypergeometric allocation of responders. Returns nullopt when a
// pooled response rate is 0 or 1 (zero variance, split not considered).
std::optional<SplitTest> uplift_split_test(const GroupCounts& counts);

// Candidate cut grid: lo + j*(hi-lo)/n_split for j = 1..n_split.
std::vector<double> split_candidates(double lo, double hi, int n_split);

struct NodeRecord {
  double lo = 0.0, hi = 0.0;
  std::size_t rows = 0;
  std::uint64_t treated = 0, control = 0;
  bool split = false;
  double cut = 0.0, z = 0.0, p = 1.0;
  std::string note;  // why the node became a leaf
};

struct QuantizationTree {
  std::string variable;
  std::vector<double> cuts;         // ascending
  std::vector<double> leaf_uplift;  // leftmost leaf first, cuts.size()+1 entries
};

struct BinResult {
  std::optional<QuantizationTree> tree;  // nullopt: no significant split at the root
  std::vector<NodeRecord> trace;
};

// Recursive supervised binning: at each node the candidate grid is recomputed
// from the node's own value range, the candidate with the smallest p-value
// wins (ties to the smaller cut), and a split is kept when p <= alpha and
// both children keep at least n_min treated and n_min control rows.
BinResult bin_uplift(const UpliftDataset& ds, const std::string& x, int n_split,
                     double alpha, int n_min);

// Bin codes 0..cuts.size() by the same rule the tree used: values below a cut
// go left. Out-of-range values land in the outermost bins.
std::vector<int> apply_bins(const QuantizationTree& tree,
                            std::span<const double> values);

struct BinUpliftParams {
  int n_split = 10;
  double alpha = 0.05;
  int n_min = 30;
};

struct VariableBinning {
  std::string variable;
  BinResult result;
};

struct EnhancedResult {
  UpliftDataset data;  // one categorical <var>_quantized column per split variable
  std::vector<VariableBinning> outcomes;
};

EnhancedResult bin_uplift_enhanced(const UpliftDataset& ds,
                                   std::span<const std::string> variables,
                                   const BinUpliftParams& params);

struct OrdinalEncoding {
  UpliftDataset data;               // column replaced by numeric ranks 1..K
  std::vector<std::string> levels;  // rank order, lowest uplift first
  std::vector<double> level_uplift;
};

// Ranks the levels of a categorical column by their observed uplift,
// ascending; ties break lexicographically. Every level needs both arms.
OrdinalEncoding categorical_to_ordinal(const UpliftDataset& ds, const std::string& x);

struct Rect {
  std::uint64_t treated = 0, control = 0;
  std::uint64_t treated_resp = 0, control_resp = 0;
  bool valid = false;   // both arms have at least n_min rows
  double uplift = 0.0;  // meaningful when valid
  int category = 0;     // 1..nb_group; 0 for rectangles without rows
};

struct RectGrid {
  std::string var1, var2;
  int n_split = 0, n_min = 0, nb_group = 0;
  std::vector<double> x_edges, y_edges;  // n_split+1 each
  std::vector<Rect> rects;               // index ix*n_split + iy
  double overall = 0.0;  // dataset uplift, the fallback for invalid rectangles

  const Rect& at(int ix, int iy) const {
    return rects[static_cast<std::size_t>(ix) * n_split + iy];
  }
};

struct SquareResult {
  RectGrid grid;
  UpliftDataset data;  // + Uplift_<var1>_<var2> and Cat_<var1>_<var2>
};

// Equal-width n_split x n_split grid over two numeric variables. Rows in
// rectangles with fewer than n_min rows in either arm fall back to the
// overall uplift. The per-row values are then ranked (descending, ties
// together) into nb_group categories of near-equal size, category 1 highest.
SquareResult square_uplift(const UpliftDataset& ds, const std::string& var1,
                           const std::string& var2, int n_split, int n_min,
                           int nb_group);

}  // namespace uplift
