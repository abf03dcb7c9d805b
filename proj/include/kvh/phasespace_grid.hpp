#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kvh/ccr_algebra.hpp"

namespace kvh {

using cplx = std::complex<double>;

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which spectral conjugate an axis has: q <-> lambda_q, p <-> lambda_p, x <-> k.
enum class Role : std::uint8_t { q = 0, p = 1, x = 2 };

std::string to_string(Role r);
Role parse_role(std::string_view s);

struct Axis {
  std::string name;
  Role role = Role::q;
  double min = 0.0;
  double extent = 1.0;
  std::size_t points = 8;

  double spacing() const { return extent / static_cast<double>(points); }
  double coordinate(std::size_t j) const { return min + spacing() * static_cast<double>(j); }
  /// Angular wavenumber of FFT bin j. The Nyquist bin reports -pi/h.
  double wavenumber(std::size_t j) const;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Periodic tensor-product grid. Row-major: the last axis is innermost.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t rank() const { return axes_.size(); }
  const Axis& axis(std::size_t a) const { return axes_.at(a); }
  std::optional<std::size_t> find_axis(std::string_view name) const;
  std::size_t axis_index(std::string_view name) const;
  std::vector<std::size_t> axes_with_role(Role r) const;

  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t a) const { return strides_[a]; }
  std::size_t index_along(std::size_t flat, std::size_t a) const { return flat / strides_[a] % axes_[a].points; }
  double coordinate(std::size_t flat, std::size_t a) const { return axes_[a].coordinate(index_along(flat, a)); }
  double cell_weight() const { return weight_; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double weight_ = 0.0;
};

/// Classical particles as (q axis, p axis) pairs: the i-th q axis goes with
/// the i-th p axis. Throws if the counts differ.
std::vector<std::pair<std::size_t, std::size_t>> classical_pairs(const GridSpec& grid);

class Wavefunction {
 public:
  Wavefunction() = default;
  explicit Wavefunction(GridSpec grid);
  Wavefunction(GridSpec grid, std::vector<cplx> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// <psi, psi>
  double norm() const;
  void normalize();

  Wavefunction& operator+=(const Wavefunction& o);
  Wavefunction& operator-=(const Wavefunction& o);
  Wavefunction& operator*=(cplx c);
  friend Wavefunction operator+(Wavefunction a, const Wavefunction& b) { return a += b; }
  friend Wavefunction operator-(Wavefunction a, const Wavefunction& b) { return a -= b; }
  friend Wavefunction operator*(cplx c, Wavefunction a) { return a *= c; }

 private:
  void require_grid(const Wavefunction& o) const;

  GridSpec grid_;
  std::vector<cplx> values_;
};

// Worker threads used by the grid kernels. Reductions never depend on it.
void set_thread_count(unsigned n);
unsigned thread_count();
void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& body);

/// Forward transforms every line along `axis`, hands the spectrum to
/// fn(base, spectrum) where base is the flat index of the line's first cell,
/// and transforms back (normalized).
using LineFn = std::function<void(std::size_t base, cplx* spectrum)>;
void transform_lines(Wavefunction& w, std::size_t axis, const LineFn& fn);

/// psi(x) -> psi(x - s) along `axis`, exact for band-limited data.
void shift(Wavefunction& w, std::size_t axis, double s);
/// Per-line shift amount computed from the line's base index.
void shift_lines(Wavefunction& w, std::size_t axis, const std::function<double(std::size_t base)>& amount);
/// Spectral multiplier for a shift by s: exp(-i kappa s), Nyquist bin cos(kappa s).
cplx shift_factor(const Axis& axis, std::size_t j, double s);

cplx inner_product(const Wavefunction& a, const Wavefunction& b);

/// -i d/d(axis), spectral; the Nyquist bin is dropped.
Wavefunction apply_lambda(const Wavefunction& w, std::string_view axis);

using CoordFn = std::function<cplx(std::span<const double> coords)>;
Wavefunction apply_mult(const Wavefunction& w, const CoordFn& f);
/// Symbols of f must be axis names or entries of `constants`.
Wavefunction apply_mult(const Wavefunction& w, const CPoly& f,
                        const std::map<std::string, double, std::less<>>& constants = {});

/// How algebra generators act on a grid: generator index -> axis index, and
/// numeric values for central symbols.
struct OperatorBinding {
  std::map<std::size_t, std::size_t> axes;
  std::map<std::string, std::complex<double>, std::less<>> central;
};

/// Binds every generator to the axis named after its coordinate symbol
/// (q, p, x); lambda generators share the axis of their conjugate.
OperatorBinding bind_by_name(const Algebra& algebra, const GridSpec& grid,
                             std::map<std::string, std::complex<double>, std::less<>> central = {});

Wavefunction apply_operator(const Wavefunction& w, const NCPoly& op, const OperatorBinding& binding);

/// <psi|op|psi> / <psi|psi>
cplx expectation(const Wavefunction& w, const NCPoly& op, const OperatorBinding& binding);
cplx expectation(const Wavefunction& w, const std::function<Wavefunction(const Wavefunction&)>& op);

/// sum |psi|^2 f(flat) * cell weight, fixed summation order.
double density_moment(const Wavefunction& w, const std::function<double(std::size_t flat)>& f);
/// <psi, g(-i d/d axis) psi>, computed in wavenumber space.
double spectral_moment(const Wavefunction& w, std::size_t axis, const std::function<double(double kappa)>& g);

enum class PhaseKind { none, linear, action_seed };

std::string to_string(PhaseKind k);
PhaseKind parse_phase_kind(std::string_view s);

/// psi = prod_a exp(-(x_a - c_a)^2 / (2 w_a^2)) times an optional phase:
/// linear exp(i sum k_a x_a), or action_seed exp(i sum p (q - q_c)) over
/// classical pairs. Widths are the standard deviation of psi.
struct GaussianSpec {
  std::vector<double> center;
  std::vector<double> width;
  PhaseKind phase = PhaseKind::none;
  std::vector<double> wavenumber;
};

void validate_gaussian(const GridSpec& grid, const GaussianSpec& spec);
/// Continuum-normalized closed form at arbitrary coordinates.
cplx gaussian_value(const GridSpec& grid, const GaussianSpec& spec, std::span<const double> coords);
/// Sampled on the grid and normalized so that <psi, psi> = 1.
Wavefunction gaussian_init(const GridSpec& grid, const GaussianSpec& spec);

/// Real field on a sub-grid.
struct Field {
  std::vector<Axis> axes;
  std::vector<double> values;
};

/// |psi|^2 integrated over every axis not listed in `keep` (keep order is the
/// grid's order).
Field marginal_density(const Wavefunction& w, const std::vector<std::string>& keep);
void write_field_csv(std::ostream& os, const Field& f);

/// Largest density on any boundary face over the peak density.
double leakage(const Wavefunction& w);
double max_imag(const Wavefunction& w);
double max_abs(const Wavefunction& w);
/// Cells where |psi| > rel * max|psi|.
std::vector<std::uint8_t> phase_mask(const Wavefunction& w, double rel = 1e-6);

// Binary dump: 64-byte preamble, 32 bytes per axis, then interleaved
// little-endian (re, im) doubles in row-major order.
inline constexpr std::uint32_t dump_version = 1;
void write_dump(std::ostream& os, const Wavefunction& w);
Wavefunction read_dump(std::istream& is);
void write_dump_file(const std::string& path, const Wavefunction& w);
Wavefunction read_dump_file(const std::string& path);

}  // namespace kvh
