#pragma once

#include <vector>

#include "latentcast/rnn/cell.hpp"

namespace latentcast::rnn {

enum class Direction { forward, backward, bidirectional };

/// Per-step caches of one unrolled pass. `reverse_steps[k]` belongs to time
/// index T-1-k.
struct SequenceTrace {
	Direction direction = Direction::forward;
	std::size_t length = 0;
	std::vector<StepCache> forward_steps;
	std::vector<StepCache> reverse_steps;
};

struct SequenceResult {
	/// T x width hidden states in input time order; width is 2h for
	/// bidirectional runs (forward half first).
	Matrix states;
	/// State after the last processed step of the forward pass (or of the
	/// reverse pass for Direction::backward).
	HiddenState final;
	/// Bidirectional only: reverse pass state after reaching time 0.
	HiddenState final_reverse;
};

/// Unrolls `p` over the rows of `xs` (T x d). Both directions start from
/// `init`. A bidirectional run uses `reverse_params` for the reverse pass
/// when given, otherwise the same weights in both directions.
SequenceResult sequence_forward(const CellParams &p, const Matrix &xs, const HiddenState &init, Direction direction,
                                SequenceTrace *trace = nullptr, const CellParams *reverse_params = nullptr);

struct SequenceInputGradients {
	Matrix d_inputs;  // T x d
	HiddenState d_init;
};

/// Exact BPTT. `d_states` (T x width, or empty for none) carries the loss
/// gradient w.r.t. every emitted hidden state; d_final / d_final_reverse
/// add gradients w.r.t. the final states (c parts may be empty). Parameter
/// gradients accumulate into `grads` and, for the reverse pass,
/// `reverse_grads` (defaults to `grads`).
SequenceInputGradients sequence_backward(const CellParams &p, const SequenceTrace &trace, const Matrix &d_states,
                                         const HiddenState &d_final, const HiddenState &d_final_reverse,
                                         CellParams &grads, const CellParams *reverse_params = nullptr,
                                         CellParams *reverse_grads = nullptr);

} // namespace latentcast::rnn
