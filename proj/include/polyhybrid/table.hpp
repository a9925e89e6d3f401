#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polyhybrid
{

/// Compressed jagged array: row i holds the entries data[offsets[i] .. offsets[i+1]).
///
/// Used for every incidence relation (faces around faces, patch memberships,
/// patch DOF maps).
class Table
{
public:
    Table() : offsets_{0} {}
    explicit Table(const std::vector<std::vector<int>>& rows);
    Table(std::vector<int> offsets, std::vector<int> data);

    std::size_t size() const { return offsets_.size() - 1; }
    std::size_t num_entries() const { return data_.size(); }

    std::span<const int> operator[](std::size_t row) const
    {
        return {data_.data() + offsets_[row], static_cast<std::size_t>(offsets_[row + 1] - offsets_[row])};
    }

    std::size_t row_size(std::size_t row) const
    {
        return static_cast<std::size_t>(offsets_[row + 1] - offsets_[row]);
    }

    const std::vector<int>& offsets() const { return offsets_; }
    const std::vector<int>& data() const { return data_; }

    std::vector<std::vector<int>> to_rows() const;

    /// Inverse relation with column ids in [0, num_columns); rows of the result are sorted.
    Table transpose(std::size_t num_columns) const;

    /// Sorts the entries of every row in ascending order.
    Table sorted() const;

    bool operator==(const Table&) const = default;

private:
    std::vector<int> offsets_;
    std::vector<int> data_;
};

} // namespace polyhybrid
