#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uplift {

// One named column: numeric (doubles) or categorical (string labels).
struct Column {
  std::string name;
  bool numeric = true;
  std::vector<double> values;
  std::vector<std::string> labels;

  std::size_t size() const { return numeric ? values.size() : labels.size(); }

  static Column num(std::string name, std::vector<double> values) {
    Column c;
    c.name = std::move(name);
    c.numeric = true;
    c.values = std::move(values);
    return c;
  }

  static Column cat(std::string name, std::vector<std::string> labels) {
    Column c;
    c.name = std::move(name);
    c.numeric = false;
    c.labels = std::move(labels);
    return c;
  }
};

// Tabular data from a randomized experiment: a binary outcome column, a
// binary treatment column, and feature columns. Column names are unique and
// the outcome/treatment values are validated to be exactly 0 or 1 at
// construction.
class UpliftDataset {
 public:
  UpliftDataset(std::vector<Column> columns, std::string outcome, std::string treat);

  std::size_t n() const { return n_; }
  const std::string& outcome_name() const { return outcome_; }
  const std::string& treat_name() const { return treat_; }

  const std::vector<Column>& columns() const { return cols_; }
  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;
  std::span<const double> numeric(const std::string& name) const;

  // All column names except outcome and treatment, in dataset order.
  std::vector<std::string> feature_names() const;

  const std::vector<std::uint8_t>& outcome01() const { return y_; }
  const std::vector<std::uint8_t>& treat01() const { return t_; }

  UpliftDataset subset(std::span<const std::size_t> rows) const;

  // Appends the column, or replaces an existing column of the same name in
  // place.
  UpliftDataset with_column(Column col) const;

 private:
  std::vector<Column> cols_;
  std::string outcome_;
  std::string treat_;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> y_;
  std::vector<std::uint8_t> t_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// RFC 4180 reader: quoted fields, embedded separators/newlines, doubled
// quotes, CRLF or LF endings. A column is numeric when every cell parses
// fully as a double; empty cells are rejected.
std::vector<Column> read_csv_columns(const std::string& path);

UpliftDataset load_csv(const std::string& path, const std::string& outcome,
                       const std::string& treat);

void write_csv(const UpliftDataset& ds, const std::string& path);

// Replaces a categorical column by K-1 binary indicators <column>_<level>,
// one per level in lexicographic order, omitting the lexicographically first
// level as the reference.
UpliftDataset encode_dummies(const UpliftDataset& ds, const std::string& column);

// encode_dummies applied to every categorical feature column.
UpliftDataset encode_all_dummies(const UpliftDataset& ds);

struct SplitConfig {
  double p = 0.7;
  std::vector<std::string> strata;
  std::uint64_t seed = 0;
};

struct SplitResult {
  UpliftDataset train;
  UpliftDataset valid;
  std::vector<std::string> warnings;
};

// Stratified train/validation split: within each stratum, round(p * m) rows
// (half up) drawn without replacement go to train. Rows keep their original
// dataset order inside each part. Single-row strata go to train with a
// warning.
SplitResult split_uplift(const UpliftDataset& ds, const SplitConfig& cfg);

}  // namespace uplift
