#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "latentcast/numeric/activations.hpp"
#include "latentcast/numeric/affine.hpp"
#include "latentcast/numeric/matrix.hpp"
#include "latentcast/numeric/rng.hpp"
#include "test_support.hpp"

using namespace latentcast;
using latentcast::testing::random_matrix;
using latentcast::testing::random_vector;

TEST_CASE("matvec hand cases") {
	const Vector v{1, 2, 3};
	CHECK(matvec(Matrix::identity(3), v) == v);
	CHECK(matvec(Matrix::from_rows({{1, 2}, {3, 4}}), Vector{1, 1}) == Vector{3, 7});
	CHECK(matvec(Matrix(2, 2), Vector{5, 5}) == Vector{0, 0});
	CHECK_THROWS_AS(matvec(Matrix(2, 3), Vector{1, 2}), std::invalid_argument);
}

TEST_CASE("matrix kernels agree with index loops") {
	SeededRng rng(11);
	for (int trial = 0; trial < 50; ++trial) {
		const std::size_t r = 1 + rng.uniform_index(6);
		const std::size_t c = 1 + rng.uniform_index(6);
		const Matrix m = random_matrix(r, c, rng);
		const Vector v = random_vector(c, rng);
		const Vector u = random_vector(r, rng);

		Vector expect(r, 0.0);
		for (std::size_t i = 0; i < r; ++i) {
			for (std::size_t j = 0; j < c; ++j) {
				expect[i] += m(i, j) * v[j];
			}
		}
		const Vector got = matvec(m, v);
		for (std::size_t i = 0; i < r; ++i) {
			CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
		}

		Vector acc_t(c, 0.5);
		matvec_transposed_accumulate(m, u, acc_t);
		for (std::size_t j = 0; j < c; ++j) {
			double s = 0.5;
			for (std::size_t i = 0; i < r; ++i) {
				s += m(i, j) * u[i];
			}
			CHECK(acc_t[j] == doctest::Approx(s).epsilon(1e-14));
		}

		Matrix outer = m;
		outer_accumulate(outer, u, v);
		for (std::size_t i = 0; i < r; ++i) {
			for (std::size_t j = 0; j < c; ++j) {
				CHECK(outer(i, j) == doctest::Approx(m(i, j) + u[i] * v[j]).epsilon(1e-14));
			}
		}
	}
}

TEST_CASE("row-offset accumulation touches only the addressed block") {
	const Matrix m = Matrix::from_rows({{1, 0}, {0, 1}, {2, 3}});
	Vector out(1, 0.0);
	matvec_accumulate(m, Vector{1, 1}, out, 2);
	CHECK(out[0] == 5.0);
	Vector back(2, 0.0);
	matvec_transposed_accumulate(m, Vector{1}, back, 2);
	CHECK(back == Vector{2, 3});
}

TEST_CASE("dot, axpy and squared_norm") {
	CHECK(dot(Vector{1, 2, 3}, Vector{4, 5, 6}) == 32.0);
	Vector y{1, 1};
	axpy(2.0, Vector{3, 4}, y);
	CHECK(y == Vector{7, 9});
	CHECK(squared_norm(Vector{3, 4}) == 25.0);
	CHECK_THROWS_AS(dot(Vector{1}, Vector{1, 2}), std::invalid_argument);
}

TEST_CASE("standard normal stream") {
	SeededRng a(42), b(42);
	CHECK(sample_standard_normal(a, 3) == sample_standard_normal(b, 3));
	CHECK(sample_standard_normal(a, 0).empty());

	SeededRng rng(42);
	const Vector xs = sample_standard_normal(rng, 100000);
	const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
	double var = 0.0;
	for (double x : xs) {
		var += (x - mean) * (x - mean);
	}
	var /= static_cast<double>(xs.size());
	CHECK(mean >= -0.02);
	CHECK(mean <= 0.02);
	CHECK(var >= 0.98);
	CHECK(var <= 1.02);
}

TEST_CASE("uniform draws stay in range and differ by seed") {
	SeededRng rng(3);
	for (int i = 0; i < 10000; ++i) {
		const double u = rng.uniform();
		REQUIRE(u >= 0.0);
		REQUIRE(u < 1.0);
		const std::size_t k = rng.uniform_index(7);
		REQUIRE(k < 7);
	}
	SeededRng x(1), y(2);
	CHECK(x.next_u64() != y.next_u64());
}

TEST_CASE("shuffle is a permutation") {
	SeededRng rng(9);
	for (std::size_t n : {0u, 1u, 2u, 17u, 100u}) {
		std::vector<std::size_t> v(n);
		std::iota(v.begin(), v.end(), 0);
		shuffle_in_place(v, rng);
		std::vector<std::size_t> sorted = v;
		std::sort(sorted.begin(), sorted.end());
		std::vector<std::size_t> expect(n);
		std::iota(expect.begin(), expect.end(), 0);
		CHECK(sorted == expect);
	}
}

TEST_CASE("activations") {
	CHECK(activate(Vector{0.0}, Activation::sigmoid)[0] == 0.5);
	CHECK(activate(Vector{0.0}, Activation::tanh)[0] == 0.0);
	const Vector s = activate(Vector{-800.0, 800.0, -1e6}, Activation::sigmoid);
	for (double v : s) {
		CHECK(std::isfinite(v));
	}
	CHECK(s[0] == 0.0);
	CHECK(s[1] == 1.0);
	SeededRng rng(5);
	for (int i = 0; i < 1000; ++i) {
		const double x = rng.uniform(-30, 30);
		CHECK(sigmoid(x) == doctest::Approx(1.0 / (1.0 + std::exp(-x))).epsilon(1e-13));
		CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-15));
	}
}

TEST_CASE("affine backward matches finite differences") {
	SeededRng rng(21);
	Affine a = Affine::initialized(3, 2, rng);
	const Vector x = random_vector(3, rng);
	const Vector g = random_vector(2, rng);
	Affine grad = Affine::zeros(3, 2);
	Vector dx(3, 0.0);
	a.backward(x, g, grad, dx);
	const double h = 1e-6;
	for (std::size_t i = 0; i < 3; ++i) {
		Vector xp = x, xm = x;
		xp[i] += h;
		xm[i] -= h;
		const double num = (dot(g, a.apply(xp)) - dot(g, a.apply(xm))) / (2 * h);
		CHECK(dx[i] == doctest::Approx(num).epsilon(1e-8));
	}
	for (std::size_t r = 0; r < 2; ++r) {
		CHECK(grad.bias(r, 0) == g[r]);
		for (std::size_t c = 0; c < 3; ++c) {
			CHECK(grad.weight(r, c) == doctest::Approx(g[r] * x[c]));
		}
	}
}

TEST_CASE("init_uniform_scaled respects the fan-in bound") {
	SeededRng rng(1);
	Matrix m(20, 16);
	init_uniform_scaled(m, 16, rng);
	std::set<double> distinct(m.data().begin(), m.data().end());
	CHECK(distinct.size() > 300);
	for (double v : m.data()) {
		CHECK(std::abs(v) <= 0.25);
	}
}
