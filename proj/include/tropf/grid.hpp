#pragma once

#include <algorithm>
#include <cassert>
#include <span>
#include <vector>

namespace tropf {

/// Dense row-major element-by-hour table (lines, nodes, units, generators).
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[index(r, c)];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[index(r, c)];
    }

    std::span<const double> row(int r) const { return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)}; }
    std::span<double> row(int r) { return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)}; }
    const std::vector<double>& data() const { return data_; }

    double max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }
    double min() const { return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end()); }

    /// Copy of one column as a rows x 1 grid.
    Grid column(int c) const {
        Grid g(rows_, 1);
        for (int r = 0; r < rows_; ++r) g(r, 0) = (*this)(r, c);
        return g;
    }

    /// Writes `src` (rows x 1) into column c.
    void set_column(int c, const Grid& src) {
        for (int r = 0; r < rows_; ++r) (*this)(r, c) = src(r, 0);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace tropf
