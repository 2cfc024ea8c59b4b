#include "latentcast/rnn/cell.hpp"

#include <cmath>
#include <stdexcept>

#include "latentcast/numeric/activations.hpp"

namespace latentcast::rnn {

std::string_view to_string(CellKind kind) {
	return kind == CellKind::gru ? "gru" : "lstm";
}

CellKind parse_cell_kind(std::string_view name) {
	if (name == "gru" || name == "GRU") {
		return CellKind::gru;
	}
	if (name == "lstm" || name == "LSTM") {
		return CellKind::lstm;
	}
	throw std::invalid_argument("unknown cell kind '" + std::string(name) + "' (expected gru or lstm)");
}

CellParams CellParams::zeros(CellKind kind, std::size_t input_size, std::size_t hidden_size) {
	if (input_size == 0 || hidden_size == 0) {
		throw std::invalid_argument("CellParams: input and hidden size must be >= 1");
	}
	const std::size_t g = gate_count(kind) * hidden_size;
	CellParams p;
	p.kind = kind;
	p.input_size = input_size;
	p.hidden_size = hidden_size;
	p.w_input = Matrix(g, input_size);
	p.w_hidden = Matrix(g, hidden_size);
	p.bias = Matrix(g, 1);
	return p;
}

CellParams CellParams::initialized(CellKind kind, std::size_t input_size, std::size_t hidden_size, SeededRng &rng) {
	CellParams p = zeros(kind, input_size, hidden_size);
	init_uniform_scaled(p.w_input, hidden_size, rng);
	init_uniform_scaled(p.w_hidden, hidden_size, rng);
	init_uniform_scaled(p.bias, hidden_size, rng);
	if (kind == CellKind::lstm) {
		for (std::size_t i = 0; i < hidden_size; ++i) {
			p.bias(hidden_size + i, 0) = 1.0;
		}
	}
	return p;
}

std::size_t CellParams::parameter_count() const {
	return w_input.size() + w_hidden.size() + bias.size();
}

void CellParams::validate() const {
	const std::size_t g = gate_count(kind) * hidden_size;
	if (w_input.rows() != g || w_input.cols() != input_size || w_hidden.rows() != g ||
	    w_hidden.cols() != hidden_size || bias.rows() != g || bias.cols() != 1) {
		throw std::invalid_argument("CellParams: tensor shapes inconsistent with (d, h)");
	}
}

HiddenState HiddenState::zeros(CellKind kind, std::size_t hidden_size) {
	HiddenState s;
	s.h.assign(hidden_size, 0.0);
	if (kind == CellKind::lstm) {
		s.c.assign(hidden_size, 0.0);
	}
	return s;
}

namespace {

void check_step_shapes(const CellParams &p, std::span<const double> x, const HiddenState &state) {
	if (x.size() != p.input_size) {
		throw std::invalid_argument("cell_step: input length " + std::to_string(x.size()) + " != input_size " +
		                            std::to_string(p.input_size));
	}
	if (state.h.size() != p.hidden_size) {
		throw std::invalid_argument("cell_step: hidden state length mismatch");
	}
	if (p.kind == CellKind::lstm && state.c.size() != p.hidden_size) {
		throw std::invalid_argument("cell_step: LSTM cell state length mismatch");
	}
}

HiddenState gru_step(const CellParams &p, std::span<const double> x, const HiddenState &state, StepCache *cache) {
	const std::size_t h = p.hidden_size;
	Vector pre(p.bias.data().begin(), p.bias.data().end());
	matvec_accumulate(p.w_input, x, pre);
	// reset and update blocks see h_prev directly
	matvec_accumulate(p.w_hidden, state.h, std::span<double>(pre).first(2 * h));

	Vector gates(3 * h);
	Vector reset_hidden(h);
	for (std::size_t i = 0; i < 2 * h; ++i) {
		gates[i] = sigmoid(pre[i]);
	}
	for (std::size_t i = 0; i < h; ++i) {
		reset_hidden[i] = gates[i] * state.h[i];
	}
	// candidate block sees r * h_prev
	matvec_accumulate(p.w_hidden, reset_hidden, std::span<double>(pre).subspan(2 * h, h), 2 * h);

	HiddenState next;
	next.h.resize(h);
	for (std::size_t i = 0; i < h; ++i) {
		const double n = std::tanh(pre[2 * h + i]);
		const double u = gates[h + i];
		gates[2 * h + i] = n;
		next.h[i] = (1.0 - u) * n + u * state.h[i];
	}
	if (cache != nullptr) {
		cache->x.assign(x.begin(), x.end());
		cache->h_prev = state.h;
		cache->c_prev.clear();
		cache->gates = std::move(gates);
		cache->reset_hidden = std::move(reset_hidden);
		cache->c_tanh.clear();
		cache->h = next.h;
		cache->c.clear();
	}
	return next;
}

HiddenState lstm_step(const CellParams &p, std::span<const double> x, const HiddenState &state, StepCache *cache) {
	const std::size_t h = p.hidden_size;
	Vector pre(p.bias.data().begin(), p.bias.data().end());
	matvec_accumulate(p.w_input, x, pre);
	matvec_accumulate(p.w_hidden, state.h, pre);

	Vector gates(4 * h);
	HiddenState next;
	next.h.resize(h);
	next.c.resize(h);
	Vector c_tanh(h);
	for (std::size_t i = 0; i < h; ++i) {
		const double in = sigmoid(pre[i]);
		const double forget = sigmoid(pre[h + i]);
		const double cand = std::tanh(pre[2 * h + i]);
		const double out = sigmoid(pre[3 * h + i]);
		gates[i] = in;
		gates[h + i] = forget;
		gates[2 * h + i] = cand;
		gates[3 * h + i] = out;
		next.c[i] = forget * state.c[i] + in * cand;
		c_tanh[i] = std::tanh(next.c[i]);
		next.h[i] = out * c_tanh[i];
	}
	if (cache != nullptr) {
		cache->x.assign(x.begin(), x.end());
		cache->h_prev = state.h;
		cache->c_prev = state.c;
		cache->gates = std::move(gates);
		cache->reset_hidden.clear();
		cache->c_tanh = std::move(c_tanh);
		cache->h = next.h;
		cache->c = next.c;
	}
	return next;
}

StepGradients gru_backward(const CellParams &p, const StepCache &cache, std::span<const double> dh, CellParams &grads) {
	const std::size_t h = p.hidden_size;
	Vector a(3 * h); // pre-activation gradients [reset, update, candidate]
	StepGradients out;
	out.dh_prev.assign(h, 0.0);
	for (std::size_t i = 0; i < h; ++i) {
		const double u = cache.gates[h + i];
		const double n = cache.gates[2 * h + i];
		const double dn = dh[i] * (1.0 - u);
		const double du = dh[i] * (cache.h_prev[i] - n);
		out.dh_prev[i] = dh[i] * u;
		a[2 * h + i] = dn * (1.0 - n * n);
		a[h + i] = du * u * (1.0 - u);
	}
	// candidate: pre_n = W_n x + U_n (r * h_prev) + b_n
	Vector d_reset_hidden(h, 0.0);
	std::span<const double> a_n = std::span<const double>(a).subspan(2 * h, h);
	matvec_transposed_accumulate(p.w_hidden, a_n, d_reset_hidden, 2 * h);
	outer_accumulate(grads.w_hidden, a_n, cache.reset_hidden, 2 * h);
	for (std::size_t i = 0; i < h; ++i) {
		const double r = cache.gates[i];
		out.dh_prev[i] += d_reset_hidden[i] * r;
		const double dr = d_reset_hidden[i] * cache.h_prev[i];
		a[i] = dr * r * (1.0 - r);
	}
	std::span<const double> a_ru = std::span<const double>(a).first(2 * h);
	matvec_transposed_accumulate(p.w_hidden, a_ru, out.dh_prev, 0);
	outer_accumulate(grads.w_hidden, a_ru, cache.h_prev, 0);

	outer_accumulate(grads.w_input, a, cache.x);
	axpy(1.0, a, grads.bias.data());
	out.dx.assign(p.input_size, 0.0);
	matvec_transposed_accumulate(p.w_input, a, out.dx);
	return out;
}

StepGradients lstm_backward(const CellParams &p, const StepCache &cache, std::span<const double> dh,
                            std::span<const double> dc_next, CellParams &grads) {
	const std::size_t h = p.hidden_size;
	Vector a(4 * h);
	StepGradients out;
	out.dc_prev.assign(h, 0.0);
	for (std::size_t i = 0; i < h; ++i) {
		const double in = cache.gates[i];
		const double forget = cache.gates[h + i];
		const double cand = cache.gates[2 * h + i];
		const double o = cache.gates[3 * h + i];
		const double ct = cache.c_tanh[i];
		const double dc = (dc_next.empty() ? 0.0 : dc_next[i]) + dh[i] * o * (1.0 - ct * ct);
		a[i] = dc * cand * in * (1.0 - in);
		a[h + i] = dc * cache.c_prev[i] * forget * (1.0 - forget);
		a[2 * h + i] = dc * in * (1.0 - cand * cand);
		a[3 * h + i] = dh[i] * ct * o * (1.0 - o);
		out.dc_prev[i] = dc * forget;
	}
	outer_accumulate(grads.w_input, a, cache.x);
	outer_accumulate(grads.w_hidden, a, cache.h_prev);
	axpy(1.0, a, grads.bias.data());
	out.dx.assign(p.input_size, 0.0);
	matvec_transposed_accumulate(p.w_input, a, out.dx);
	out.dh_prev.assign(h, 0.0);
	matvec_transposed_accumulate(p.w_hidden, a, out.dh_prev);
	return out;
}

} // namespace

HiddenState cell_step(const CellParams &p, std::span<const double> x, const HiddenState &state, StepCache *cache) {
	check_step_shapes(p, x, state);
	return p.kind == CellKind::gru ? gru_step(p, x, state, cache) : lstm_step(p, x, state, cache);
}

StepGradients cell_step_backward(const CellParams &p, const StepCache &cache, std::span<const double> dh,
                                 std::span<const double> dc, CellParams &grads) {
	const std::size_t h = p.hidden_size;
	if (dh.size() != h || cache.h.size() != h || cache.x.size() != p.input_size ||
	    cache.gates.size() != gate_count(p.kind) * h) {
		throw std::invalid_argument("cell_step_backward: cache or gradient shape mismatch");
	}
	if (!dc.empty() && dc.size() != h) {
		throw std::invalid_argument("cell_step_backward: cell-state gradient shape mismatch");
	}
	if (p.kind == CellKind::gru) {
		return gru_backward(p, cache, dh, grads);
	}
	return lstm_backward(p, cache, dh, dc, grads);
}

} // namespace latentcast::rnn
