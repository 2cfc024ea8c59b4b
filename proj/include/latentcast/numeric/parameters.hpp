#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "latentcast/numeric/matrix.hpp"

// Helpers over any parameter struct exposing
//   template <class F> void visit(F&& f)        // f(name, Matrix&)
//   template <class F> void visit(F&& f) const  // f(name, const Matrix&)

namespace latentcast {

template <class P>
std::vector<Matrix *> tensors_of(P &p) {
	std::vector<Matrix *> out;
	p.visit([&](const std::string &, Matrix &m) { out.push_back(&m); });
	return out;
}

template <class P>
std::vector<const Matrix *> tensors_of(const P &p) {
	std::vector<const Matrix *> out;
	p.visit([&](const std::string &, const Matrix &m) { out.push_back(&m); });
	return out;
}

/// p *= factor for every tensor.
template <class P>
void scale_in_place(P &p, double factor) {
	p.visit([&](const std::string &, Matrix &m) {
		for (double &x : m.data()) {
			x *= factor;
		}
	});
}

template <class P>
std::vector<std::pair<std::string, const Matrix *>> named_tensors_of(const P &p) {
	std::vector<std::pair<std::string, const Matrix *>> out;
	p.visit([&](const std::string &name, const Matrix &m) { out.emplace_back(name, &m); });
	return out;
}

template <class P>
P zeros_like(const P &p) {
	P z = p;
	z.visit([](const std::string &, Matrix &m) { m.fill(0.0); });
	return z;
}

template <class P>
std::size_t count_parameters(const P &p) {
	std::size_t n = 0;
	p.visit([&](const std::string &, const Matrix &m) { n += m.size(); });
	return n;
}

/// acc += scale * g, tensor by tensor. Both must have identical structure.
template <class P>
void add_scaled(P &acc, const P &g, double scale) {
	auto dst = tensors_of(acc);
	std::size_t i = 0;
	g.visit([&](const std::string &, const Matrix &m) {
		axpy(scale, m.data(), dst[i++]->data());
	});
}

template <class P>
double global_norm(const P &p) {
	double s = 0.0;
	p.visit([&](const std::string &, const Matrix &m) { s += squared_norm(m.data()); });
	return std::sqrt(s);
}

template <class P>
bool all_finite(const P &p) {
	bool ok = true;
	p.visit([&](const std::string &, const Matrix &m) { ok = ok && m.all_finite(); });
	return ok;
}

/// FNV-1a style hash over the bit pattern of every entry; identifies a
/// parameter snapshot.
template <class P>
std::uint64_t fingerprint(const P &p) {
	std::uint64_t h = 0xcbf29ce484222325ULL;
	p.visit([&](const std::string &, const Matrix &m) {
		for (double x : m.data()) {
			std::uint64_t bits;
			std::memcpy(&bits, &x, sizeof bits);
			h ^= bits;
			h *= 0x100000001b3ULL;
		}
	});
	return h;
}

} // namespace latentcast
