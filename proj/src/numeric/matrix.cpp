#include "latentcast/numeric/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace latentcast {

namespace {

std::string shape_message(const char *what, std::size_t expected, std::size_t got) {
	return std::string(what) + ": expected " + std::to_string(expected) + ", got " + std::to_string(got);
}

// Four independent partial sums break the add-latency chain without
// changing the summation order between runs.
double dot_unrolled(const double *a, const double *b, std::size_t n) {
	double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
	std::size_t i = 0;
	for (; i + 4 <= n; i += 4) {
		s0 += a[i] * b[i];
		s1 += a[i + 1] * b[i + 1];
		s2 += a[i + 2] * b[i + 2];
		s3 += a[i + 3] * b[i + 3];
	}
	for (; i < n; ++i) {
		s0 += a[i] * b[i];
	}
	return (s0 + s1) + (s2 + s3);
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
	if (data_.size() != rows_ * cols_) {
		throw std::invalid_argument(shape_message("Matrix data length", rows_ * cols_, data_.size()));
	}
}

Matrix Matrix::identity(std::size_t n) {
	Matrix m(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		m(i, i) = 1.0;
	}
	return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
	const std::size_t r = rows.size();
	const std::size_t c = r == 0 ? 0 : rows.begin()->size();
	std::vector<double> data;
	data.reserve(r * c);
	for (const auto &row : rows) {
		if (row.size() != c) {
			throw std::invalid_argument("Matrix::from_rows: ragged rows");
		}
		data.insert(data.end(), row.begin(), row.end());
	}
	return Matrix(r, c, std::move(data));
}

Matrix Matrix::column(std::span<const double> values) {
	return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double value) {
	for (double &x : data_) {
		x = value;
	}
}

bool Matrix::all_finite() const {
	for (double x : data_) {
		if (!std::isfinite(x)) {
			return false;
		}
	}
	return true;
}

Vector matvec(const Matrix &m, std::span<const double> v) {
	if (m.cols() != v.size()) {
		throw std::invalid_argument(shape_message("matvec dimension mismatch", m.cols(), v.size()));
	}
	Vector out(m.rows(), 0.0);
	matvec_accumulate(m, v, out);
	return out;
}

void matvec_accumulate(const Matrix &m, std::span<const double> v, std::span<double> out,
                       std::size_t row_begin) {
	if (m.cols() != v.size()) {
		throw std::invalid_argument(shape_message("matvec dimension mismatch", m.cols(), v.size()));
	}
	if (row_begin + out.size() > m.rows()) {
		throw std::invalid_argument("matvec row range out of bounds");
	}
	const std::size_t n = m.cols();
	const double *base = m.data().data();
	for (std::size_t i = 0; i < out.size(); ++i) {
		out[i] += dot_unrolled(base + (row_begin + i) * n, v.data(), n);
	}
}

void matvec_transposed_accumulate(const Matrix &m, std::span<const double> v, std::span<double> out,
                                  std::size_t row_begin) {
	if (m.cols() != out.size()) {
		throw std::invalid_argument(shape_message("transposed matvec dimension mismatch", m.cols(), out.size()));
	}
	if (row_begin + v.size() > m.rows()) {
		throw std::invalid_argument("transposed matvec row range out of bounds");
	}
	const std::size_t n = m.cols();
	double *o = out.data();
	for (std::size_t i = 0; i < v.size(); ++i) {
		const double a = v[i];
		if (a == 0.0) {
			continue;
		}
		const double *r = m.data().data() + (row_begin + i) * n;
		for (std::size_t j = 0; j < n; ++j) {
			o[j] += a * r[j];
		}
	}
}

void outer_accumulate(Matrix &m, std::span<const double> a, std::span<const double> b, std::size_t row_begin) {
	if (m.cols() != b.size() || row_begin + a.size() > m.rows()) {
		throw std::invalid_argument("outer_accumulate dimension mismatch");
	}
	const std::size_t n = m.cols();
	for (std::size_t i = 0; i < a.size(); ++i) {
		const double s = a[i];
		if (s == 0.0) {
			continue;
		}
		double *r = m.data().data() + (row_begin + i) * n;
		for (std::size_t j = 0; j < n; ++j) {
			r[j] += s * b[j];
		}
	}
}

double dot(std::span<const double> a, std::span<const double> b) {
	if (a.size() != b.size()) {
		throw std::invalid_argument(shape_message("dot length mismatch", a.size(), b.size()));
	}
	return dot_unrolled(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
	if (x.size() != y.size()) {
		throw std::invalid_argument(shape_message("axpy length mismatch", y.size(), x.size()));
	}
	for (std::size_t i = 0; i < x.size(); ++i) {
		y[i] += alpha * x[i];
	}
}

double squared_norm(std::span<const double> v) {
	return dot_unrolled(v.data(), v.data(), v.size());
}

} // namespace latentcast
