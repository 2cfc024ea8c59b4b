#include "latentcast/rnn/sequence.hpp"

#include <stdexcept>

namespace latentcast::rnn {

namespace {

HiddenState run_pass(const CellParams &p, const Matrix &xs, const HiddenState &init, bool reverse, Matrix &states,
                     std::size_t column_offset, std::vector<StepCache> *caches) {
	const std::size_t T = xs.rows();
	HiddenState state = init;
	if (caches != nullptr) {
		caches->assign(T, StepCache{});
	}
	for (std::size_t k = 0; k < T; ++k) {
		const std::size_t t = reverse ? T - 1 - k : k;
		state = cell_step(p, xs.row(t), state, caches != nullptr ? &(*caches)[k] : nullptr);
		for (std::size_t i = 0; i < p.hidden_size; ++i) {
			states(t, column_offset + i) = state.h[i];
		}
	}
	return state;
}

void backward_pass(const CellParams &p, const std::vector<StepCache> &caches, bool reverse, const Matrix &d_states,
                   std::size_t column_offset, const HiddenState &d_final, CellParams &grads, Matrix &d_inputs,
                   HiddenState &d_init) {
	const std::size_t T = caches.size();
	const std::size_t h = p.hidden_size;
	Vector dh = d_final.h.empty() ? Vector(h, 0.0) : d_final.h;
	Vector dc;
	if (p.kind == CellKind::lstm) {
		dc = d_final.c.empty() ? Vector(h, 0.0) : d_final.c;
	}
	for (std::size_t k = T; k-- > 0;) {
		const std::size_t t = reverse ? T - 1 - k : k;
		if (!d_states.empty()) {
			for (std::size_t i = 0; i < h; ++i) {
				dh[i] += d_states(t, column_offset + i);
			}
		}
		StepGradients g = cell_step_backward(p, caches[k], dh, dc, grads);
		axpy(1.0, g.dx, d_inputs.row(t));
		dh = std::move(g.dh_prev);
		dc = std::move(g.dc_prev);
	}
	axpy(1.0, dh, d_init.h);
	if (p.kind == CellKind::lstm) {
		axpy(1.0, dc, d_init.c);
	}
}

} // namespace

SequenceResult sequence_forward(const CellParams &p, const Matrix &xs, const HiddenState &init, Direction direction,
                                SequenceTrace *trace, const CellParams *reverse_params) {
	if (xs.rows() == 0) {
		throw std::invalid_argument("sequence_forward: empty sequence");
	}
	if (xs.cols() != p.input_size) {
		throw std::invalid_argument("sequence_forward: input width does not match cell input size");
	}
	const CellParams &rp = reverse_params != nullptr ? *reverse_params : p;
	if (direction == Direction::bidirectional && (rp.hidden_size != p.hidden_size || rp.input_size != p.input_size)) {
		throw std::invalid_argument("sequence_forward: reverse cell shape differs from forward cell");
	}
	const std::size_t h = p.hidden_size;
	const bool bidir = direction == Direction::bidirectional;
	SequenceResult result;
	result.states = Matrix(xs.rows(), bidir ? 2 * h : h);
	if (trace != nullptr) {
		trace->direction = direction;
		trace->length = xs.rows();
		trace->forward_steps.clear();
		trace->reverse_steps.clear();
	}
	switch (direction) {
	case Direction::forward:
		result.final = run_pass(p, xs, init, false, result.states, 0, trace ? &trace->forward_steps : nullptr);
		break;
	case Direction::backward:
		result.final = run_pass(p, xs, init, true, result.states, 0, trace ? &trace->reverse_steps : nullptr);
		break;
	case Direction::bidirectional:
		result.final = run_pass(p, xs, init, false, result.states, 0, trace ? &trace->forward_steps : nullptr);
		result.final_reverse = run_pass(rp, xs, init, true, result.states, h, trace ? &trace->reverse_steps : nullptr);
		break;
	}
	return result;
}

SequenceInputGradients sequence_backward(const CellParams &p, const SequenceTrace &trace, const Matrix &d_states,
                                         const HiddenState &d_final, const HiddenState &d_final_reverse,
                                         CellParams &grads, const CellParams *reverse_params,
                                         CellParams *reverse_grads) {
	const std::size_t T = trace.length;
	const std::size_t h = p.hidden_size;
	const bool bidir = trace.direction == Direction::bidirectional;
	const std::size_t width = bidir ? 2 * h : h;
	if (T == 0) {
		throw std::invalid_argument("sequence_backward: empty trace");
	}
	if (!d_states.empty() && (d_states.rows() != T || d_states.cols() != width)) {
		throw std::invalid_argument("sequence_backward: upstream gradient shape mismatch");
	}
	const bool has_forward = trace.direction != Direction::backward;
	const bool has_reverse = trace.direction != Direction::forward;
	if ((has_forward && trace.forward_steps.size() != T) || (has_reverse && trace.reverse_steps.size() != T)) {
		throw std::invalid_argument("sequence_backward: trace does not match sequence length");
	}
	if (!has_forward && !has_reverse) {
		throw std::invalid_argument("sequence_backward: trace has no passes");
	}
	const std::size_t d = has_forward ? trace.forward_steps.front().x.size() : trace.reverse_steps.front().x.size();
	if (d != p.input_size || grads.w_input.rows() != p.w_input.rows()) {
		throw std::invalid_argument("sequence_backward: trace or gradient buffer does not match parameters");
	}

	SequenceInputGradients out;
	out.d_inputs = Matrix(T, p.input_size);
	out.d_init = HiddenState::zeros(p.kind, h);
	switch (trace.direction) {
	case Direction::forward:
		backward_pass(p, trace.forward_steps, false, d_states, 0, d_final, grads, out.d_inputs, out.d_init);
		break;
	case Direction::backward:
		backward_pass(p, trace.reverse_steps, true, d_states, 0, d_final, grads, out.d_inputs, out.d_init);
		break;
	case Direction::bidirectional: {
		const CellParams &rp = reverse_params != nullptr ? *reverse_params : p;
		CellParams &rg = reverse_grads != nullptr ? *reverse_grads : grads;
		backward_pass(p, trace.forward_steps, false, d_states, 0, d_final, grads, out.d_inputs, out.d_init);
		backward_pass(rp, trace.reverse_steps, true, d_states, h, d_final_reverse, rg, out.d_inputs, out.d_init);
		break;
	}
	}
	return out;
}

} // namespace latentcast::rnn
