#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mce {

/// SplitMix64 bit mixer; the basis for all deterministic offsets.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0,1) from the top 53 bits of a mixed word.
double u01_from_bits(std::uint64_t bits);

/// Fractional part in [0,1).
double frac01(double x);

/// Irrational stride constants for a rank-1 Kronecker lattice in d dimensions
/// (powers of the generalized golden ratio).
std::vector<double> kronecker_alphas(int d);

/// Deterministic low-discrepancy point k of a stream identified by
/// (seed, stream): component a is frac(offset_a + k * alpha_a).
double lattice_coord(std::uint64_t seed, std::uint64_t stream, int axis, int dim,
                     std::int64_t k);

/// Sum with a fixed pairwise combination tree; bit-reproducible for a given
/// input order regardless of how the values were produced.
double pairwise_sum(std::span<const double> values);

/// Static-chunked parallel loop (slot-independent work only). The result of
/// the program must not depend on the thread count; this runs `fn(i)` for
/// i in [0, count) with deterministic work assignment.
void parallel_for(int count, const std::function<void(int)>& fn);

/// printf("%.17g") — full round-trip precision, locale-independent.
std::string format_g17(double v);

/// printf("%.<sig>g").
std::string format_g(double v, int sig);

/// Linear or log-spaced grid with `count >= 2` points inclusive of both ends.
std::vector<double> make_grid(bool log_spaced, double lo, double hi, int count);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mce
