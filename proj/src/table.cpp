#include "polyhybrid/table.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>

namespace polyhybrid
{

Table::Table(const std::vector<std::vector<int>>& rows)
{
    offsets_.reserve(rows.size() + 1);
    offsets_.push_back(0);
    for (const auto& row : rows)
    {
        data_.insert(data_.end(), row.begin(), row.end());
        offsets_.push_back(static_cast<int>(data_.size()));
    }
}

Table::Table(std::vector<int> offsets, std::vector<int> data)
  : offsets_(std::move(offsets)), data_(std::move(data))
{
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != static_cast<int>(data_.size())
        || !std::is_sorted(offsets_.begin(), offsets_.end()))
    {
        fail(ErrorCode::InvalidArgument, "malformed table offsets");
    }
}

std::vector<std::vector<int>> Table::to_rows() const
{
    std::vector<std::vector<int>> rows(size());
    for (std::size_t i = 0; i < size(); ++i)
    {
        auto r = (*this)[i];
        rows[i].assign(r.begin(), r.end());
    }
    return rows;
}

Table Table::transpose(std::size_t num_columns) const
{
    std::vector<int> counts(num_columns + 1, 0);
    for (int c : data_)
    {
        if (c < 0 || static_cast<std::size_t>(c) >= num_columns)
            fail(ErrorCode::InvalidArgument, "table entry out of range in transpose");
        ++counts[c + 1];
    }
    for (std::size_t i = 0; i < num_columns; ++i)
        counts[i + 1] += counts[i];
    std::vector<int> data(data_.size());
    std::vector<int> fill(counts.begin(), counts.end() - 1);
    // rows are visited in increasing order, so each output row comes out sorted
    for (std::size_t row = 0; row < size(); ++row)
        for (int c : (*this)[row])
            data[fill[c]++] = static_cast<int>(row);
    return Table(std::move(counts), std::move(data));
}

Table Table::sorted() const
{
    Table out = *this;
    for (std::size_t i = 0; i < size(); ++i)
        std::sort(out.data_.begin() + out.offsets_[i], out.data_.begin() + out.offsets_[i + 1]);
    return out;
}

} // namespace polyhybrid
