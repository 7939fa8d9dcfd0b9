#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsmat/ids.hpp"

namespace gsmat {

// An n-ary relation over variables with bag semantics. Rows are stored
// row-major in one flat buffer. A zero-column table still counts rows, so the
// join identity (one empty row) is representable.
class BindingTable {
 public:
  BindingTable() = default;
  explicit BindingTable(std::vector<std::string> schema);
  BindingTable(std::vector<std::string> schema, std::vector<NodeId> data);
  BindingTable(std::vector<std::string> schema, std::vector<NodeId> data, std::size_t rows);

  // Zero columns, one row.
  static BindingTable unit();

  const std::vector<std::string>& schema() const { return schema_; }
  std::size_t width() const { return schema_.size(); }
  std::size_t size() const { return rows_; }
  bool empty() const { return rows_ == 0; }

  std::optional<std::size_t> column(std::string_view var) const;

  std::span<const NodeId> row(std::size_t i) const { return {data_.data() + i * width(), width()}; }
  std::span<const NodeId> data() const { return data_; }
  NodeId at(std::size_t row, std::size_t col) const { return data_[row * width() + col]; }

  void append(std::span<const NodeId> row);
  void reserve(std::size_t rows) { data_.reserve(rows * width()); }

  // Column the rows are known to be non-decreasing on.
  std::optional<std::size_t> sorted_by() const { return sorted_by_; }
  void mark_sorted_by(std::optional<std::size_t> col) { sorted_by_ = col; }
  // Stable sort on one column.
  void sort_by(std::size_t col);

  // Columns reordered to `vars`; `distinct` keeps the first occurrence of each row.
  BindingTable project(std::span<const std::string> vars, bool distinct = false) const;

  // Rows as vectors in lexicographic order; two tables over the same schema
  // are bag-equal iff these agree.
  std::vector<std::vector<NodeId>> sorted_rows() const;

 private:
  std::vector<std::string> schema_;
  std::vector<NodeId> data_;
  std::size_t rows_ = 0;
  std::optional<std::size_t> sorted_by_;
};

}  // namespace gsmat
