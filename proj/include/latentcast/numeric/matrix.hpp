#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace latentcast {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Biases are stored as n x 1 matrices so
/// every learnable tensor in the project has the same type.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
	Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

	static Matrix identity(std::size_t n);
	static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
	static Matrix column(std::span<const double> values);

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	std::size_t size() const { return data_.size(); }
	bool empty() const { return data_.empty(); }

	double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

	std::span<double> data() { return data_; }
	std::span<const double> data() const { return data_; }
	std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
	std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

	void fill(double value);
	bool all_finite() const;
	bool same_shape(const Matrix &other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

	friend bool operator==(const Matrix &, const Matrix &) = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

/// m * v. Throws std::invalid_argument when m.cols() != v.size().
Vector matvec(const Matrix &m, std::span<const double> v);

/// out[i - row_begin] += sum_j m(i, j) * v[j] for i in [row_begin, row_begin + out.size()).
void matvec_accumulate(const Matrix &m, std::span<const double> v, std::span<double> out,
                       std::size_t row_begin = 0);

/// out += m[rows]^T * v, where v covers rows [row_begin, row_begin + v.size()).
void matvec_transposed_accumulate(const Matrix &m, std::span<const double> v, std::span<double> out,
                                  std::size_t row_begin = 0);

/// m[rows] += a * b^T, where a covers rows [row_begin, row_begin + a.size()).
void outer_accumulate(Matrix &m, std::span<const double> a, std::span<const double> b,
                      std::size_t row_begin = 0);

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double squared_norm(std::span<const double> v);

} // namespace latentcast
