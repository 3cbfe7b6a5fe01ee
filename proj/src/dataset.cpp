#include "uplift/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "uplift/errors.hpp"
#include "uplift/rng.hpp"

namespace uplift {

namespace {

void validate_binary(const Column& c, const std::string& role) {
  if (!c.numeric) {
    throw ValidationError(role + " column '" + c.name + "' must be numeric 0/1");
  }
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double v = c.values[i];
    if (v != 0.0 && v != 1.0) {
      throw ValidationError(role + " column '" + c.name + "' must be 0/1; found " +
                            format_double(v) + " at row index " + std::to_string(i));
    }
  }
}

std::vector<std::uint8_t> to01(const Column& c) {
  std::vector<std::uint8_t> out(c.values.size());
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    out[i] = c.values[i] == 1.0 ? 1 : 0;
  }
  return out;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size();
}

}  // namespace

UpliftDataset::UpliftDataset(std::vector<Column> columns, std::string outcome,
                             std::string treat)
    : cols_(std::move(columns)), outcome_(std::move(outcome)), treat_(std::move(treat)) {
  if (cols_.empty()) throw SchemaError("dataset has no columns");
  n_ = cols_.front().size();
  if (n_ == 0) throw ValidationError("dataset has no rows");
  std::set<std::string> seen;
  for (const Column& c : cols_) {
    if (c.name.empty()) throw SchemaError("dataset has an unnamed column");
    if (!seen.insert(c.name).second) {
      throw SchemaError("duplicate column name '" + c.name + "'");
    }
    if (c.size() != n_) {
      throw SchemaError("column '" + c.name + "' has " + std::to_string(c.size()) +
                        " rows, expected " + std::to_string(n_));
    }
  }
  if (outcome_ == treat_) {
    throw SchemaError("outcome and treatment must be distinct columns");
  }
  if (!seen.count(outcome_)) throw SchemaError("outcome column '" + outcome_ + "' not found");
  if (!seen.count(treat_)) throw SchemaError("treatment column '" + treat_ + "' not found");
  const Column& yc = column(outcome_);
  const Column& tc = column(treat_);
  validate_binary(yc, "outcome");
  validate_binary(tc, "treatment");
  y_ = to01(yc);
  t_ = to01(tc);
}

bool UpliftDataset::has_column(const std::string& name) const {
  for (const Column& c : cols_) {
    if (c.name == name) return true;
  }
  return false;
}

const Column& UpliftDataset::column(const std::string& name) const {
  for (const Column& c : cols_) {
    if (c.name == name) return c;
  }
  throw ArgError("unknown column '" + name + "'");
}

std::span<const double> UpliftDataset::numeric(const std::string& name) const {
  const Column& c = column(name);
  if (!c.numeric) throw ArgError("column '" + name + "' is categorical, expected numeric");
  return c.values;
}

std::vector<std::string> UpliftDataset::feature_names() const {
  std::vector<std::string> out;
  for (const Column& c : cols_) {
    if (c.name != outcome_ && c.name != treat_) out.push_back(c.name);
  }
  return out;
}

UpliftDataset UpliftDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(cols_.size());
  for (const Column& c : cols_) {
    Column sub;
    sub.name = c.name;
    sub.numeric = c.numeric;
    if (c.numeric) {
      sub.values.reserve(rows.size());
      for (std::size_t r : rows) sub.values.push_back(c.values[r]);
    } else {
      sub.labels.reserve(rows.size());
      for (std::size_t r : rows) sub.labels.push_back(c.labels[r]);
    }
    cols.push_back(std::move(sub));
  }
  return UpliftDataset(std::move(cols), outcome_, treat_);
}

UpliftDataset UpliftDataset::with_column(Column col) const {
  std::vector<Column> cols = cols_;
  bool replaced = false;
  for (Column& c : cols) {
    if (c.name == col.name) {
      c = col;
      replaced = true;
      break;
    }
  }
  if (!replaced) cols.push_back(std::move(col));
  return UpliftDataset(std::move(cols), outcome_, treat_);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    text.erase(0, 3);
  }

  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t line = 1;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      table.rows.push_back(std::move(record));
    }
    record.clear();
  };

  std::size_t i = 0;
  const std::size_t len = text.size();
  while (i < len) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < len && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      ++i;
      continue;
    }
    switch (ch) {
      case '"':
        if (field.empty() && !was_quoted) {
          in_quotes = true;
          was_quoted = true;
        } else {
          throw ParseError(path + ": line " + std::to_string(line) +
                           ": unexpected quote inside field");
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < len && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += ch;
        break;
    }
    ++i;
  }
  if (in_quotes) {
    throw ParseError(path + ": unterminated quoted field at end of file");
  }
  if (!field.empty() || !record.empty()) end_record();

  if (table.header.empty()) throw SchemaError(path + ": empty file");
  return table;
}

}  // namespace

std::vector<Column> read_csv_columns(const std::string& path) {
  CsvTable table = parse_csv(path);
  const std::size_t ncol = table.header.size();

  std::set<std::string> seen;
  for (const std::string& name : table.header) {
    if (name.empty()) throw SchemaError(path + ": empty column name in header");
    if (!seen.insert(name).second) {
      throw SchemaError(path + ": duplicate column name '" + name + "'");
    }
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != ncol) {
      throw ParseError(path + ": data row " + std::to_string(r) + " has " +
                       std::to_string(table.rows[r].size()) + " fields, expected " +
                       std::to_string(ncol));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      if (table.rows[r][c].empty()) {
        throw ParseError(path + ": missing value at data row " + std::to_string(r) +
                         ", column '" + table.header[c] + "'");
      }
    }
  }

  std::vector<Column> cols(ncol);
  for (std::size_t c = 0; c < ncol; ++c) {
    cols[c].name = table.header[c];
    bool numeric = true;
    std::vector<double> values(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (!parse_full_double(table.rows[r][c], values[r])) {
        numeric = false;
        break;
      }
    }
    cols[c].numeric = numeric;
    if (numeric) {
      cols[c].values = std::move(values);
    } else {
      cols[c].labels.reserve(table.rows.size());
      for (auto& row : table.rows) cols[c].labels.push_back(row[c]);
    }
  }
  return cols;
}

UpliftDataset load_csv(const std::string& path, const std::string& outcome,
                       const std::string& treat) {
  std::vector<Column> cols = read_csv_columns(path);
  if (cols.empty() || cols.front().size() == 0) {
    throw ValidationError(path + ": no data rows");
  }
  return UpliftDataset(std::move(cols), outcome, treat);
}

void write_csv(const UpliftDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  const auto& cols = ds.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    out << quote_field(cols[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < ds.n(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (cols[c].numeric) {
        out << format_double(cols[c].values[r]);
      } else {
        out << quote_field(cols[c].labels[r]);
      }
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

UpliftDataset encode_dummies(const UpliftDataset& ds, const std::string& column) {
  const Column& c = ds.column(column);
  if (c.numeric) {
    throw ArgError("encode_dummies: column '" + column + "' is numeric");
  }
  std::set<std::string> level_set(c.labels.begin(), c.labels.end());
  if (level_set.size() < 2) {
    throw ValidationError("encode_dummies: column '" + column +
                          "' has fewer than 2 levels");
  }
  std::vector<std::string> levels(level_set.begin(), level_set.end());

  std::vector<Column> indicators;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    Column ind;
    ind.name = column + "_" + levels[k];
    if (ds.has_column(ind.name)) {
      throw SchemaError("encode_dummies: indicator name '" + ind.name +
                        "' collides with an existing column");
    }
    ind.numeric = true;
    ind.values.resize(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
      ind.values[i] = c.labels[i] == levels[k] ? 1.0 : 0.0;
    }
    indicators.push_back(std::move(ind));
  }

  std::vector<Column> cols;
  for (const Column& old : ds.columns()) {
    if (old.name == column) {
      for (Column& ind : indicators) cols.push_back(std::move(ind));
    } else {
      cols.push_back(old);
    }
  }
  return UpliftDataset(std::move(cols), ds.outcome_name(), ds.treat_name());
}

UpliftDataset encode_all_dummies(const UpliftDataset& ds) {
  std::vector<std::string> cat;
  for (const Column& c : ds.columns()) {
    if (!c.numeric) cat.push_back(c.name);
  }
  UpliftDataset out = ds;
  for (const std::string& name : cat) out = encode_dummies(out, name);
  return out;
}

namespace {

std::size_t train_size(double p, std::size_t m) {
  const double r = p * static_cast<double>(m);
  const double lo = std::floor(r);
  const double frac = r - lo;
  std::size_t k = static_cast<std::size_t>(lo);
  if (frac >= 0.5 - 1e-9) ++k;
  return std::min(k, m);
}

std::string stratum_cell(const Column& c, std::size_t row) {
  return c.numeric ? format_double(c.values[row]) : c.labels[row];
}

}  // namespace

SplitResult split_uplift(const UpliftDataset& ds, const SplitConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) {
    throw ArgError("split_uplift: p must be in (0, 1)");
  }
  if (cfg.strata.empty()) {
    throw ArgError("split_uplift: at least one stratification column is required");
  }
  std::vector<const Column*> strata;
  for (const std::string& name : cfg.strata) strata.push_back(&ds.column(name));

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::string key;
    for (std::size_t s = 0; s < strata.size(); ++s) {
      if (s) key += ',';
      key += cfg.strata[s] + "=" + stratum_cell(*strata[s], i);
    }
    groups[key].push_back(i);
  }

  Rng rng(cfg.seed);
  std::vector<std::string> warnings;
  std::vector<std::size_t> train_rows, valid_rows;
  for (auto& [key, rows] : groups) {
    if (rows.size() == 1) {
      warnings.push_back("stratum {" + key + "} has a single row; assigned to train");
      train_rows.push_back(rows.front());
      continue;
    }
    std::vector<std::size_t> order = rows;
    rng.shuffle(order);
    const std::size_t k = train_size(cfg.p, order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < k ? train_rows : valid_rows).push_back(order[i]);
    }
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(valid_rows.begin(), valid_rows.end());

  if (train_rows.empty()) {
    throw ValidationError("split_uplift: training partition is empty; increase p");
  }
  if (valid_rows.empty()) {
    throw ValidationError("split_uplift: validation partition is empty; decrease p");
  }
  return SplitResult{ds.subset(train_rows), ds.subset(valid_rows), std::move(warnings)};
}

}  // namespace uplift
