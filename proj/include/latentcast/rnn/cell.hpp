#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "latentcast/numeric/matrix.hpp"
#include "latentcast/numeric/rng.hpp"

namespace latentcast::rnn {

enum class CellKind { gru, lstm };

std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view name);

/// Gate blocks per cell: GRU [reset, update, candidate], LSTM [input, forget, cell, output].
constexpr std::size_t gate_count(CellKind kind) {
	return kind == CellKind::gru ? 3 : 4;
}

/// Weights of one recurrent cell. Each gate block occupies hidden_size
/// consecutive rows of w_input / w_hidden / bias, one bias per gate.
struct CellParams {
	CellKind kind = CellKind::gru;
	std::size_t input_size = 0;
	std::size_t hidden_size = 0;
	Matrix w_input;  // (gates * h) x d
	Matrix w_hidden; // (gates * h) x h
	Matrix bias;     // (gates * h) x 1

	static CellParams zeros(CellKind kind, std::size_t input_size, std::size_t hidden_size);
	/// Uniform +-1/sqrt(h) init; LSTM forget-gate bias set to +1.
	static CellParams initialized(CellKind kind, std::size_t input_size, std::size_t hidden_size, SeededRng &rng);

	/// gates * (d*h + h*h + h)
	std::size_t parameter_count() const;
	void validate() const;

	template <class F>
	void visit(F &&f) {
		visit_impl(*this, "cell", f);
	}
	template <class F>
	void visit(F &&f) const {
		visit_impl(*this, "cell", f);
	}
	template <class F>
	void visit(std::string_view prefix, F &&f) {
		visit_impl(*this, prefix, f);
	}
	template <class F>
	void visit(std::string_view prefix, F &&f) const {
		visit_impl(*this, prefix, f);
	}

private:
	template <class Self, class F>
	static void visit_impl(Self &self, std::string_view prefix, F &f) {
		const std::string p(prefix);
		f(p + ".w_input", self.w_input);
		f(p + ".w_hidden", self.w_hidden);
		f(p + ".bias", self.bias);
	}
};

/// Recurrent state; `c` is empty for GRU cells.
struct HiddenState {
	Vector h;
	Vector c;

	static HiddenState zeros(CellKind kind, std::size_t hidden_size);
};

/// Everything one step's backward pass needs.
struct StepCache {
	Vector x;
	Vector h_prev;
	Vector c_prev;
	Vector gates;        // post-activation, gates * h
	Vector reset_hidden; // GRU only: r * h_prev
	Vector c_tanh;       // LSTM only: tanh(c)
	Vector h;
	Vector c;
};

struct StepGradients {
	Vector dx;
	Vector dh_prev;
	Vector dc_prev; // empty for GRU
};

/// One recurrence step. Throws std::invalid_argument on dimension mismatch.
HiddenState cell_step(const CellParams &p, std::span<const double> x, const HiddenState &state,
                      StepCache *cache = nullptr);

/// Backward through one step. dh/dc are gradients w.r.t. the step's output
/// state (dc ignored for GRU, may be empty). Parameter gradients are
/// accumulated into `grads`.
StepGradients cell_step_backward(const CellParams &p, const StepCache &cache, std::span<const double> dh,
                                 std::span<const double> dc, CellParams &grads);

} // namespace latentcast::rnn
