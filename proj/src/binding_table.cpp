#include "gsmat/binding_table.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include "gsmat/error.hpp"

namespace gsmat {

namespace {

void check_schema(const std::vector<std::string>& schema) {
  std::set<std::string_view> seen;
  for (const auto& v : schema) {
    if (!seen.insert(v).second) throw ContractViolation("binding table: duplicate column " + v);
  }
}

struct RowHash {
  std::size_t operator()(const std::vector<NodeId>& r) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (NodeId v : r) h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

}  // namespace

BindingTable::BindingTable(std::vector<std::string> schema) : schema_(std::move(schema)) { check_schema(schema_); }

BindingTable::BindingTable(std::vector<std::string> schema, std::vector<NodeId> data)
    : schema_(std::move(schema)), data_(std::move(data)) {
  check_schema(schema_);
  if (schema_.empty()) {
    if (!data_.empty()) throw ContractViolation("binding table: data for a zero-column table");
    return;
  }
  if (data_.size() % schema_.size() != 0) throw ContractViolation("binding table: ragged data");
  rows_ = data_.size() / schema_.size();
}

BindingTable::BindingTable(std::vector<std::string> schema, std::vector<NodeId> data, std::size_t rows)
    : schema_(std::move(schema)), data_(std::move(data)), rows_(rows) {
  check_schema(schema_);
  if (data_.size() != rows_ * schema_.size()) throw ContractViolation("binding table: data size mismatch");
}

BindingTable BindingTable::unit() { return BindingTable({}, {}, 1); }

std::optional<std::size_t> BindingTable::column(std::string_view var) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i] == var) return i;
  }
  return std::nullopt;
}

void BindingTable::append(std::span<const NodeId> row) {
  if (row.size() != width()) throw ContractViolation("binding table: row arity mismatch");
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
  sorted_by_.reset();
}

void BindingTable::sort_by(std::size_t col) {
  if (col >= width()) throw ContractViolation("binding table: sort column out of range");
  if (sorted_by_ == col) return;
  const std::size_t w = width();
  std::vector<std::size_t> order(rows_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data_[a * w + col] < data_[b * w + col]; });
  std::vector<NodeId> sorted(data_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(data_.begin() + order[i] * w, w, sorted.begin() + i * w);
  }
  data_ = std::move(sorted);
  sorted_by_ = col;
}

BindingTable BindingTable::project(std::span<const std::string> vars, bool distinct) const {
  std::vector<std::size_t> cols;
  for (const auto& v : vars) {
    auto c = column(v);
    if (!c) throw LookupError("projection: unknown variable " + v);
    cols.push_back(*c);
  }
  std::vector<NodeId> out;
  out.reserve(rows_ * cols.size());
  std::size_t kept = 0;
  std::unordered_set<std::vector<NodeId>, RowHash> seen;
  std::vector<NodeId> r(cols.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) r[k] = at(i, cols[k]);
    if (distinct && !seen.insert(r).second) continue;
    out.insert(out.end(), r.begin(), r.end());
    ++kept;
  }
  return BindingTable(std::vector<std::string>(vars.begin(), vars.end()), std::move(out), kept);
}

std::vector<std::vector<NodeId>> BindingTable::sorted_rows() const {
  std::vector<std::vector<NodeId>> rows;
  rows.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    rows.emplace_back(r.begin(), r.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace gsmat
