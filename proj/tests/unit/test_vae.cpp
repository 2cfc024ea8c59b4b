#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "latentcast/model/losses.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "test_support.hpp"

using namespace latentcast;
using namespace latentcast::model;
using latentcast::testing::check_gradients;
using latentcast::testing::random_matrix;
using latentcast::testing::random_vector;

namespace {

/// KL written directly from the Gaussian formula, without expm1.
double kl_oracle(const Vector &mu, const Vector &lv) {
	double s = 0.0;
	for (std::size_t j = 0; j < mu.size(); ++j) {
		s += -0.5 * (1.0 + lv[j] - mu[j] * mu[j] - std::exp(lv[j]));
	}
	return s;
}

Vector affine_oracle(const Affine &a, const Vector &x) {
	Vector out(a.output_size());
	for (std::size_t r = 0; r < out.size(); ++r) {
		out[r] = a.bias(r, 0);
		for (std::size_t c = 0; c < x.size(); ++c) {
			out[r] += a.weight(r, c) * x[c];
		}
	}
	return out;
}

VaeRnnConfig random_config(SeededRng &rng, rnn::CellKind cell) {
	VaeRnnConfig c;
	c.cell = cell;
	c.input_dim = 1 + rng.uniform_index(3);
	c.hidden_size = 1 + rng.uniform_index(5);
	c.latent_dim = 1 + rng.uniform_index(2);
	c.window = 1 + rng.uniform_index(4);
	c.horizon = 1 + rng.uniform_index(2);
	return c;
}

std::vector<std::uint8_t> random_mask(std::size_t n, SeededRng &rng) {
	std::vector<std::uint8_t> m(n);
	for (auto &v : m) {
		v = rng.bernoulli(0.7) ? 1 : 0;
	}
	m[rng.uniform_index(n)] = 1;
	return m;
}

struct Problem {
	VaeRnnParams params;
	Matrix x;
	Matrix y;
	std::vector<std::uint8_t> mask;
	TrainingPlan plan;
};

Problem random_problem(const VaeRnnConfig &c, SeededRng &rng) {
	Problem p;
	p.params = VaeRnnParams::initialized(c, rng);
	p.x = random_matrix(c.window, c.input_dim, rng);
	p.y = random_matrix(c.horizon, c.input_dim, rng);
	p.mask = random_mask(p.x.size(), rng);
	p.plan = draw_training_plan(c, c.horizon, 0.5, true, rng);
	return p;
}

double objective(const VaeRnnParams &q, const Problem &pr, const LossWeights &w) {
	const ModelOutput out = forward(q, pr.x, &pr.y, pr.params.config.horizon, pr.plan);
	return loss_total(evaluate_losses(out, pr.x, pr.mask, pr.y), w);
}

VaeRnnParams analytic(const Problem &pr, const LossWeights &w) {
	ForwardCache cache;
	forward(pr.params, pr.x, &pr.y, pr.params.config.horizon, pr.plan, &cache);
	return model_backward(pr.params, cache, pr.mask, pr.y, w);
}

} // namespace

TEST_CASE("KL closed form") {
	CHECK(loss_kl(Vector{0.0}, Vector{0.0}) == 0.0);
	CHECK(loss_kl(Vector{0.0, 0.0}, Vector{0.0, 0.0}) == 0.0);
	CHECK(loss_kl(Vector{1.0}, Vector{0.0}) == doctest::Approx(0.5).epsilon(1e-15));
	CHECK(std::abs(loss_kl(Vector{0.0}, Vector{std::log(4.0)}) - (1.5 - std::log(2.0))) <= 1e-12);
	SeededRng rng(12);
	for (int i = 0; i < 10000; ++i) {
		const std::size_t k = 1 + rng.uniform_index(4);
		const Vector mu = random_vector(k, rng, 5.0);
		const Vector lv = random_vector(k, rng, 20.0);
		const double kl = loss_kl(mu, lv);
		REQUIRE(kl >= 0.0);
		REQUIRE(kl == doctest::Approx(kl_oracle(mu, lv)).epsilon(1e-9));
	}
	CHECK_THROWS_AS(loss_kl(Vector{0.0}, Vector{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("reconstruction and prediction losses") {
	const Matrix x = Matrix::from_rows({{1}, {2}});
	CHECK(loss_reconstruction(x, x) == 0.0);
	CHECK(loss_reconstruction(x, Matrix::from_rows({{2}, {4}})) == 2.5);
	const std::vector<std::uint8_t> mask{1, 0};
	CHECK(loss_reconstruction(Matrix::from_rows({{1}, {9}}), Matrix::from_rows({{2}, {0}}), mask) == 1.0);
	const std::vector<std::uint8_t> none{0, 0};
	CHECK_THROWS_AS(loss_reconstruction(x, x, none), std::invalid_argument);
	CHECK_THROWS_AS(loss_reconstruction(x, Matrix(3, 1)), std::invalid_argument);

	CHECK(loss_prediction(Matrix::from_rows({{100}}), Matrix::from_rows({{100}})) == 0.0);
	CHECK(loss_prediction(Matrix::from_rows({{100}}), Matrix::from_rows({{110}})) == 100.0);
	SeededRng rng(2);
	const Matrix y = random_matrix(4, 2, rng), yh = random_matrix(4, 2, rng);
	Matrix y2 = y, yh2 = yh;
	for (double &v : y2.data()) v *= 2;
	for (double &v : yh2.data()) v *= 2;
	CHECK(loss_prediction(y2, yh2) == doctest::Approx(4 * loss_prediction(y, yh)).epsilon(1e-14));
}

TEST_CASE("weighted objective") {
	const LossParts parts{1, 2, 3};
	CHECK(loss_total(parts, {1, 1, 1}) == 6.0);
	CHECK(loss_total(parts, {0, 1, 0}) == 2.0);
	CHECK(loss_total(parts, {1, 0, 1}) == 4.0);
	CHECK_THROWS_AS((LossWeights{0, 0, 0}).validate(), std::invalid_argument);
	CHECK_THROWS_AS((LossWeights{-1, 1, 1}).validate(), std::invalid_argument);
}

TEST_CASE("encode") {
	SeededRng rng(3);
	VaeRnnConfig c;
	c.input_dim = 2;
	c.hidden_size = 4;
	c.latent_dim = 2;
	c.window = 5;
	VaeRnnParams p = VaeRnnParams::initialized(c, rng);
	const Matrix x = random_matrix(5, 2, rng);

	const LatentState a = encode(p, x), b = encode(p, x);
	CHECK(a.mu == b.mu);
	CHECK(a.logvar == b.logvar);

	rnn::HiddenState s = rnn::HiddenState::zeros(c.cell, c.hidden_size);
	for (std::size_t t = 0; t < 5; ++t) {
		s = rnn::cell_step(p.encoder, x.row(t), s);
	}
	const Vector mu = affine_oracle(p.mu_head, s.h), lv = affine_oracle(p.logvar_head, s.h);
	for (std::size_t j = 0; j < 2; ++j) {
		CHECK(std::abs(a.mu[j] - mu[j]) <= 1e-12);
		CHECK(std::abs(a.logvar[j] - lv[j]) <= 1e-12);
	}

	p.mu_head.weight.fill(0.0);
	p.logvar_head.weight.fill(0.0);
	p.logvar_head.bias.fill(-1000.0);
	const LatentState flat = encode(p, random_matrix(5, 2, rng));
	for (std::size_t j = 0; j < 2; ++j) {
		CHECK(flat.mu[j] == p.mu_head.bias(j, 0));
		CHECK(flat.logvar[j] == kLogvarMin);
	}
	CHECK_THROWS_AS(encode(p, Matrix(5, 3)), std::invalid_argument);
}

TEST_CASE("reparameterize") {
	LatentState unit{{0, 0}, {0, 0}, {}, {}};
	CHECK(reparameterize(unit, Vector{1, -1}).z == Vector{1, -1});

	LatentState tight{{0.3, -2.0}, {kLogvarMin, kLogvarMin}, {}, {}};
	const LatentState zt = reparameterize(tight, Vector{1.0, -1.0});
	for (std::size_t j = 0; j < 2; ++j) {
		CHECK(std::abs(zt.z[j] - tight.mu[j]) <= 5e-5);
	}

	SeededRng rng(4);
	for (int trial = 0; trial < 20; ++trial) {
		LatentState l{random_vector(3, rng), random_vector(3, rng, 2.0), {}, {}};
		const Vector eps = sample_standard_normal(rng, 3);
		const LatentState z = reparameterize(l, eps);
		const double h = 1e-6;
		for (std::size_t j = 0; j < 3; ++j) {
			LatentState up = l, dn = l;
			up.mu[j] += h;
			dn.mu[j] -= h;
			const double dmu = (reparameterize(up, eps).z[j] - reparameterize(dn, eps).z[j]) / (2 * h);
			CHECK(std::abs(dmu - 1.0) < 1e-6);
			up = l;
			dn = l;
			up.logvar[j] += h;
			dn.logvar[j] -= h;
			const double dlv = (reparameterize(up, eps).z[j] - reparameterize(dn, eps).z[j]) / (2 * h);
			CHECK(std::abs(dlv - (0.5 * z.z[j] - 0.5 * l.mu[j])) < 1e-6);
			for (std::size_t o = 0; o < 3; ++o) {
				if (o != j) {
					CHECK(reparameterize(up, eps).z[o] == z.z[o]);
				}
			}
		}
	}
	CHECK_THROWS_AS(reparameterize(unit, Vector{1.0}), std::invalid_argument);
}

TEST_CASE("decode matches a step-by-step oracle") {
	for (rnn::CellKind cell : {rnn::CellKind::gru, rnn::CellKind::lstm}) {
		SeededRng rng(cell == rnn::CellKind::gru ? 50 : 51);
		VaeRnnConfig c;
		c.cell = cell;
		c.input_dim = 2;
		c.hidden_size = 3;
		c.latent_dim = 2;
		c.window = 4;
		c.horizon = 3;
		const VaeRnnParams p = VaeRnnParams::initialized(c, rng);
		const Matrix x = random_matrix(4, 2, rng);
		const Vector z = random_vector(2, rng);
		const ModelOutput out = decode(p, z, x, 3);

		rnn::HiddenState s;
		s.h = affine_oracle(p.latent_to_hidden, z);
		for (double &v : s.h) v = std::tanh(v);
		if (cell == rnn::CellKind::lstm) {
			s.c = affine_oracle(p.latent_to_cell, z);
		}
		Vector input(2, 0.0);
		for (std::size_t t = 0; t < 4; ++t) {
			s = rnn::cell_step(p.decoder, input, s);
			const Vector r = affine_oracle(p.recon_head, s.h);
			for (std::size_t ch = 0; ch < 2; ++ch) {
				CHECK(std::abs(out.x_hat(t, ch) - r[ch]) <= 1e-12);
			}
			input.assign(x.row(t).begin(), x.row(t).end());
		}
		for (std::size_t j = 0; j < 3; ++j) {
			s = rnn::cell_step(p.decoder, input, s);
			const Vector r = affine_oracle(p.pred_head, s.h);
			for (std::size_t ch = 0; ch < 2; ++ch) {
				CHECK(std::abs(out.y_hat(j, ch) - r[ch]) <= 1e-12);
			}
			input = r;
		}
	}
}

TEST_CASE("decode shapes and zero start") {
	SeededRng rng(6);
	VaeRnnConfig c;
	c.input_dim = 2;
	c.hidden_size = 3;
	c.latent_dim = 2;
	c.window = 1;
	c.horizon = 1;
	VaeRnnParams p = VaeRnnParams::initialized(c, rng);
	const Matrix x = random_matrix(1, 2, rng);
	const ModelOutput out = decode(p, Vector{0.5, 0.5}, x, 1);
	CHECK(out.x_hat.rows() == 1);
	CHECK(out.x_hat.cols() == 2);
	CHECK(out.y_hat.rows() == 1);
	CHECK(out.y_hat.cols() == 2);
	CHECK_THROWS_AS(decode(p, Vector{0.5, 0.5}, x, 0), std::invalid_argument);
	CHECK_THROWS_AS(decode(p, Vector{0.5}, x, 1), std::invalid_argument);

	p.latent_to_hidden.bias.fill(0.0);
	const ModelOutput zero = decode(p, Vector{0.0, 0.0}, x, 1);
	const rnn::HiddenState s = rnn::cell_step(p.decoder, Vector{0.0, 0.0}, rnn::HiddenState::zeros(c.cell, 3));
	const Vector r = affine_oracle(p.recon_head, s.h);
	CHECK(zero.x_hat(0, 0) == doctest::Approx(r[0]).epsilon(1e-14));
	CHECK(zero.x_hat(0, 1) == doctest::Approx(r[1]).epsilon(1e-14));
}

TEST_CASE("impute keeps observed values and fills the rest") {
	SeededRng rng(7);
	VaeRnnConfig c;
	c.input_dim = 3;
	c.hidden_size = 4;
	c.latent_dim = 2;
	c.window = 6;
	const VaeRnnParams p = VaeRnnParams::initialized(c, rng);
	const Matrix x = random_matrix(6, 3, rng);
	CHECK(impute(p, x, std::vector<std::uint8_t>(18, 1)) == x);
	for (int trial = 0; trial < 20; ++trial) {
		const auto mask = random_mask(18, rng);
		const Matrix filled = impute(p, x, mask);
		CHECK(filled.all_finite());
		for (std::size_t i = 0; i < 18; ++i) {
			if (mask[i] != 0) {
				CHECK(filled.data()[i] == x.data()[i]);
			}
		}
	}
	CHECK_THROWS_AS(impute(p, x, std::vector<std::uint8_t>(18, 0)), std::invalid_argument);
}

TEST_CASE("full objective gradient matches central differences") {
	SeededRng rng(2024);
	for (rnn::CellKind cell : {rnn::CellKind::gru, rnn::CellKind::lstm}) {
		for (int trial = 0; trial < 10; ++trial) {
			const VaeRnnConfig c = random_config(rng, cell);
			CAPTURE(c.input_dim);
			CAPTURE(c.hidden_size);
			CAPTURE(c.latent_dim);
			CAPTURE(c.window);
			CAPTURE(c.horizon);
			const Problem pr = random_problem(c, rng);
			const LossWeights w{rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2)};
			const auto report = check_gradients<VaeRnnParams>(
			    pr.params, analytic(pr, w), [&](const VaeRnnParams &q) { return objective(q, pr, w); });
			CAPTURE(report.worst_tensor);
			CHECK(report.max_relative_error < 1e-4);
		}
	}
}

TEST_CASE("gradient dependency structure and linearity") {
	SeededRng rng(99);
	VaeRnnConfig c;
	c.input_dim = 2;
	c.hidden_size = 4;
	c.latent_dim = 2;
	c.window = 3;
	c.horizon = 2;
	const Problem pr = random_problem(c, rng);

	const VaeRnnParams kl_only = analytic(pr, {0, 0, 1});
	CHECK(global_norm(kl_only.encoder) > 0.0);
	CHECK(global_norm(kl_only.decoder) == 0.0);
	double heads = 0.0;
	Affine::visit(kl_only.recon_head, "r", [&](const std::string &, const Matrix &m) { heads += squared_norm(m.data()); });
	Affine::visit(kl_only.pred_head, "p", [&](const std::string &, const Matrix &m) { heads += squared_norm(m.data()); });
	CHECK(heads == 0.0);

	const VaeRnnParams one = analytic(pr, {1, 0, 0});
	const VaeRnnParams two = analytic(pr, {2, 0, 0});
	const auto a = tensors_of(one), b = tensors_of(two);
	for (std::size_t k = 0; k < a.size(); ++k) {
		for (std::size_t i = 0; i < a[k]->size(); ++i) {
			CHECK(b[k]->data()[i] == doctest::Approx(2 * a[k]->data()[i]).epsilon(1e-12));
		}
	}
}

TEST_CASE("stale cache and bad shapes are rejected") {
	SeededRng rng(5);
	VaeRnnConfig c;
	c.input_dim = 1;
	c.hidden_size = 3;
	c.latent_dim = 2;
	c.window = 4;
	c.horizon = 2;
	Problem pr = random_problem(c, rng);
	ForwardCache cache;
	forward(pr.params, pr.x, &pr.y, 2, pr.plan, &cache);
	VaeRnnParams moved = pr.params;
	moved.pred_head.bias(0, 0) += 1e-9;
	CHECK_THROWS_AS(model_backward(moved, cache, pr.mask, pr.y, {}), std::logic_error);
	CHECK_THROWS_AS(model_backward(pr.params, cache, pr.mask, Matrix(3, 1), {}), std::invalid_argument);
	CHECK_THROWS_AS(VaeRnnParams::initialized(VaeRnnConfig{rnn::CellKind::gru, 0, 1, 1, 1, 1}, rng),
	                std::invalid_argument);
}

TEST_CASE("training plans are reproducible") {
	VaeRnnConfig c;
	c.latent_dim = 3;
	SeededRng a(8), b(8);
	const TrainingPlan pa = draw_training_plan(c, 5, 0.5, true, a);
	const TrainingPlan pb = draw_training_plan(c, 5, 0.5, true, b);
	CHECK(pa.epsilon == pb.epsilon);
	CHECK(pa.teacher_forced == pb.teacher_forced);
	CHECK(pa.teacher_forced[0] == 0);
	CHECK(draw_training_plan(c, 5, 0.0, false, a).epsilon.empty());
}
