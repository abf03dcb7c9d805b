#include "kvh/phasespace_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace kvh {

std::string to_string(Role r) {
  switch (r) {
    case Role::q: return "q";
    case Role::p: return "p";
    case Role::x: return "x";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  if (s == "q") return Role::q;
  if (s == "p") return Role::p;
  if (s == "x") return Role::x;
  throw GridError("unknown axis role '" + std::string(s) + "' (expected q, p or x)");
}

double Axis::wavenumber(std::size_t j) const {
  const auto n = static_cast<std::ptrdiff_t>(points);
  auto s = static_cast<std::ptrdiff_t>(j);
  if (s >= n / 2) s -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(s) / extent;
}

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw GridError("grid needs at least one axis");
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& ax = axes_[a];
    if (ax.name.empty()) throw GridError("axis name must not be empty");
    if (ax.points < 8 || !std::has_single_bit(ax.points)) {
      throw GridError("axis '" + ax.name + "': points must be a power of two >= 8");
    }
    if (!std::isfinite(ax.min) || !std::isfinite(ax.extent) || ax.extent <= 0.0) {
      throw GridError("axis '" + ax.name + "': min and extent must be finite, extent > 0");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (axes_[b].name == ax.name) throw GridError("duplicate axis name '" + ax.name + "'");
    }
  }
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  weight_ = 1.0;
  for (std::size_t a = axes_.size(); a-- > 0;) {
    strides_[a] = size_;
    size_ *= axes_[a].points;
    weight_ *= axes_[a].spacing();
  }
}

std::optional<std::size_t> GridSpec::find_axis(std::string_view name) const {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (axes_[a].name == name) return a;
  }
  return std::nullopt;
}

std::size_t GridSpec::axis_index(std::string_view name) const {
  auto a = find_axis(name);
  if (!a) throw GridError("no axis named '" + std::string(name) + "'");
  return *a;
}

std::vector<std::size_t> GridSpec::axes_with_role(Role r) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (axes_[a].role == r) out.push_back(a);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> classical_pairs(const GridSpec& grid) {
  auto qs = grid.axes_with_role(Role::q);
  auto ps = grid.axes_with_role(Role::p);
  if (qs.size() != ps.size()) throw GridError("grid has unequal numbers of q and p axes");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < qs.size(); ++i) out.emplace_back(qs[i], ps[i]);
  return out;
}

// ---------------------------------------------------------------------------

Wavefunction::Wavefunction(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size()) {}

Wavefunction::Wavefunction(GridSpec grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw GridError("amplitude count does not match grid size");
}

void Wavefunction::require_grid(const Wavefunction& o) const {
  if (!(grid_ == o.grid_)) throw GridError("wavefunctions live on different grids");
}

double Wavefunction::norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s * grid_.cell_weight();
}

void Wavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero or non-finite wavefunction");
  *this *= 1.0 / std::sqrt(n);
}

Wavefunction& Wavefunction::operator+=(const Wavefunction& o) {
  require_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Wavefunction& Wavefunction::operator-=(const Wavefunction& o) {
  require_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Wavefunction& Wavefunction::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

// ---------------------------------------------------------------------------
// threads

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }
unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// FFT

namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::unordered_map<std::size_t, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  Plans p;
  p.forward = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.forward || !p.backward) throw std::runtime_error("FFTW plan creation failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

void transform_lines(Wavefunction& w, std::size_t axis, const LineFn& fn) {
  const auto& grid = w.grid();
  const std::size_t n = grid.axis(axis).points;
  const std::size_t stride = grid.stride(axis);
  const std::size_t lines = grid.size() / n;
  const Plans& plans = plans_for(n);
  const double scale = 1.0 / static_cast<double>(n);
  cplx* data = w.values().data();

  parallel_for(lines, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> buf(n);
    auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
    for (std::size_t line = begin; line < end; ++line) {
      const std::size_t base = (line / stride) * n * stride + line % stride;
      cplx* first = data + base;
      if (stride == 1) {
        std::memcpy(buf.data(), first, n * sizeof(cplx));
      } else {
        for (std::size_t j = 0; j < n; ++j) buf[j] = first[j * stride];
      }
      fftw_execute_dft(plans.forward, raw, raw);
      fn(base, buf.data());
      fftw_execute_dft(plans.backward, raw, raw);
      for (std::size_t j = 0; j < n; ++j) first[j * stride] = buf[j] * scale;
    }
  });
}

cplx shift_factor(const Axis& axis, std::size_t j, double s) {
  const double kappa = axis.wavenumber(j);
  if (2 * j == axis.points) return {std::cos(kappa * s), 0.0};
  return std::polar(1.0, -kappa * s);
}

void shift(Wavefunction& w, std::size_t axis, double s) {
  shift_lines(w, axis, [s](std::size_t) { return s; });
}

void shift_lines(Wavefunction& w, std::size_t axis, const std::function<double(std::size_t)>& amount) {
  const Axis ax = w.grid().axis(axis);
  transform_lines(w, axis, [&](std::size_t base, cplx* spec) {
    const double s = amount(base);
    for (std::size_t j = 0; j < ax.points; ++j) spec[j] *= shift_factor(ax, j, s);
  });
}

cplx inner_product(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid() == b.grid())) throw GridError("inner_product: grid mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_weight();
}

namespace {

void lambda_in_place(Wavefunction& w, std::size_t axis) {
  const Axis ax = w.grid().axis(axis);
  transform_lines(w, axis, [&](std::size_t, cplx* spec) {
    for (std::size_t j = 0; j < ax.points; ++j) spec[j] *= (2 * j == ax.points) ? 0.0 : ax.wavenumber(j);
  });
}

void coordinate_in_place(Wavefunction& w, std::size_t axis) {
  const auto& grid = w.grid();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= grid.coordinate(i, axis);
}

}  // namespace

Wavefunction apply_lambda(const Wavefunction& w, std::string_view axis) {
  Wavefunction out = w;
  lambda_in_place(out, w.grid().axis_index(axis));
  return out;
}

Wavefunction apply_mult(const Wavefunction& w, const CoordFn& f) {
  Wavefunction out = w;
  const auto& grid = w.grid();
  const std::size_t r = grid.rank();
  parallel_for(w.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> coords(r);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t a = 0; a < r; ++a) coords[a] = grid.coordinate(i, a);
      out[i] *= f(coords);
    }
  });
  return out;
}

Wavefunction apply_mult(const Wavefunction& w, const CPoly& f,
                        const std::map<std::string, double, std::less<>>& constants) {
  const auto& grid = w.grid();
  const auto& names = f.symbols().names();
  std::vector<std::optional<std::size_t>> axis_of(names.size());
  for (std::size_t s = 0; s < names.size(); ++s) {
    axis_of[s] = grid.find_axis(names[s]);
    if (!axis_of[s] && !constants.contains(names[s]) && f.depends_on(s)) {
      throw SymbolError("apply_mult: symbol '" + names[s] + "' is neither an axis nor a bound constant");
    }
  }
  return apply_mult(w, [&](std::span<const double> coords) {
    std::map<std::string, std::complex<double>, std::less<>> env;
    for (std::size_t s = 0; s < names.size(); ++s) {
      if (axis_of[s]) {
        env[names[s]] = coords[*axis_of[s]];
      } else if (auto it = constants.find(names[s]); it != constants.end()) {
        env[names[s]] = it->second;
      }
    }
    return f.eval(env);
  });
}

OperatorBinding bind_by_name(const Algebra& algebra, const GridSpec& grid,
                             std::map<std::string, std::complex<double>, std::less<>> central) {
  OperatorBinding b;
  b.central = std::move(central);
  for (std::size_t g = 0; g < algebra.generator_count(); ++g) {
    const auto& id = algebra.generator(g);
    const bool momentum_like = id.kind == GeneratorKind::mom || id.kind == GeneratorKind::lam_mom;
    std::string name;
    if (id.sector == Sector::quantum) {
      name = algebra.position_symbol(id.particle, id.axis);
    } else {
      name = momentum_like ? algebra.momentum_symbol(id.particle, id.axis) : algebra.position_symbol(id.particle, id.axis);
    }
    if (auto a = grid.find_axis(name)) b.axes[g] = *a;
  }
  return b;
}

Wavefunction apply_operator(const Wavefunction& w, const NCPoly& op, const OperatorBinding& binding) {
  const auto& alg = *op.algebra();
  Wavefunction total(w.grid());
  for (const auto& [word, coeff] : op.terms()) {
    Wavefunction term = w;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      auto found = binding.axes.find(*it);
      if (found == binding.axes.end()) {
        throw GridError("apply_operator: generator " + alg.generator_name(*it) + " has no axis");
      }
      const auto& id = alg.generator(*it);
      const bool derivative = id.kind == GeneratorKind::lam_pos || id.kind == GeneratorKind::lam_mom ||
                              (id.sector == Sector::quantum && id.kind == GeneratorKind::mom);
      if (derivative) {
        lambda_in_place(term, found->second);
      } else {
        coordinate_in_place(term, found->second);
      }
    }
    term *= coeff.eval(binding.central);
    total += term;
  }
  return total;
}

cplx expectation(const Wavefunction& w, const NCPoly& op, const OperatorBinding& binding) {
  return inner_product(w, apply_operator(w, op, binding)) / w.norm();
}

cplx expectation(const Wavefunction& w, const std::function<Wavefunction(const Wavefunction&)>& op) {
  return inner_product(w, op(w)) / w.norm();
}

double density_moment(const Wavefunction& w, const std::function<double(std::size_t)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += std::norm(w[i]) * f(i);
  return s * w.grid().cell_weight();
}

double spectral_moment(const Wavefunction& w, std::size_t axis, const std::function<double(double)>& g) {
  const Axis ax = w.grid().axis(axis);
  const std::size_t n = ax.points;
  std::vector<double> table(n);
  for (std::size_t j = 0; j < n; ++j) table[j] = (2 * j == n) ? 0.0 : g(ax.wavenumber(j));
  Wavefunction scratch = w;
  const std::size_t stride = w.grid().stride(axis);
  std::vector<double> per_line(w.size() / n);
  transform_lines(scratch, axis, [&](std::size_t base, cplx* spec) {
    const std::size_t line = (base / (n * stride)) * stride + base % stride;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(spec[j]) * table[j];
    per_line[line] = s;
  });
  double total = 0.0;
  for (double v : per_line) total += v;
  return total * w.grid().cell_weight() / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Gaussian initial data

std::string to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::none: return "none";
    case PhaseKind::linear: return "linear";
    case PhaseKind::action_seed: return "action_seed";
  }
  return "?";
}

PhaseKind parse_phase_kind(std::string_view s) {
  if (s == "none") return PhaseKind::none;
  if (s == "linear") return PhaseKind::linear;
  if (s == "action_seed") return PhaseKind::action_seed;
  throw std::invalid_argument("unknown phase '" + std::string(s) + "' (expected none, linear or action_seed)");
}

void validate_gaussian(const GridSpec& grid, const GaussianSpec& spec) {
  const std::size_t r = grid.rank();
  if (spec.center.size() != r || spec.width.size() != r) {
    throw GridError("gaussian: need one center and one width per axis (" + std::to_string(r) + ")");
  }
  for (std::size_t a = 0; a < r; ++a) {
    const auto& ax = grid.axis(a);
    if (!std::isfinite(spec.center[a]) || !std::isfinite(spec.width[a])) throw GridError("gaussian: non-finite parameter");
    if (spec.width[a] < 3.0 * ax.spacing()) {
      std::ostringstream msg;
      msg << "gaussian: width " << spec.width[a] << " on axis '" << ax.name << "' is below 3 grid spacings ("
          << 3.0 * ax.spacing() << "); refine the axis or widen the packet";
      throw GridError(msg.str());
    }
  }
  if (spec.phase == PhaseKind::linear && spec.wavenumber.size() != r) {
    throw GridError("gaussian: linear phase needs one wavenumber per axis");
  }
  if (spec.phase == PhaseKind::action_seed) classical_pairs(grid);
}

cplx gaussian_value(const GridSpec& grid, const GaussianSpec& spec, std::span<const double> coords) {
  double exponent = 0.0;
  double norm = 1.0;
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const double d = coords[a] - spec.center[a];
    const double w = spec.width[a];
    exponent -= d * d / (2.0 * w * w);
    norm *= 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * w);
  }
  double phase = 0.0;
  if (spec.phase == PhaseKind::linear) {
    for (std::size_t a = 0; a < grid.rank(); ++a) phase += spec.wavenumber[a] * coords[a];
  } else if (spec.phase == PhaseKind::action_seed) {
    for (auto [qa, pa] : classical_pairs(grid)) phase += coords[pa] * (coords[qa] - spec.center[qa]);
  }
  return std::polar(norm * std::exp(exponent), phase);
}

Wavefunction gaussian_init(const GridSpec& grid, const GaussianSpec& spec) {
  validate_gaussian(grid, spec);
  Wavefunction w(grid);
  for (auto& v : w.values()) v = 1.0;
  w = apply_mult(w, [&](std::span<const double> c) { return gaussian_value(grid, spec, c); });
  w.normalize();
  return w;
}

// ---------------------------------------------------------------------------
// diagnostics

Field marginal_density(const Wavefunction& w, const std::vector<std::string>& keep) {
  const auto& grid = w.grid();
  std::vector<std::size_t> kept;
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    if (std::find(keep.begin(), keep.end(), grid.axis(a).name) != keep.end()) kept.push_back(a);
  }
  for (const auto& k : keep) grid.axis_index(k);
  Field f;
  std::size_t size = 1;
  for (auto a : kept) {
    f.axes.push_back(grid.axis(a));
    size *= grid.axis(a).points;
  }
  f.values.assign(size, 0.0);
  double weight = 1.0;
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    if (std::find(kept.begin(), kept.end(), a) == kept.end()) weight *= grid.axis(a).spacing();
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::size_t idx = 0;
    for (auto a : kept) idx = idx * grid.axis(a).points + grid.index_along(i, a);
    f.values[idx] += std::norm(w[i]);
  }
  for (auto& v : f.values) v *= weight;
  return f;
}

void write_field_csv(std::ostream& os, const Field& f) {
  for (const auto& a : f.axes) os << a.name << ',';
  os << "density\n";
  os << std::setprecision(17);
  std::vector<std::size_t> idx(f.axes.size(), 0);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::size_t rem = i;
    for (std::size_t a = f.axes.size(); a-- > 0;) {
      idx[a] = rem % f.axes[a].points;
      rem /= f.axes[a].points;
    }
    for (std::size_t a = 0; a < f.axes.size(); ++a) os << f.axes[a].coordinate(idx[a]) << ',';
    os << f.values[i] << '\n';
  }
}

double leakage(const Wavefunction& w) {
  const auto& grid = w.grid();
  double peak = 0.0;
  double boundary = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = std::norm(w[i]);
    peak = std::max(peak, d);
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const std::size_t j = grid.index_along(i, a);
      if (j == 0 || j + 1 == grid.axis(a).points) {
        boundary = std::max(boundary, d);
        break;
      }
    }
  }
  return peak > 0.0 ? boundary / peak : 0.0;
}

double max_imag(const Wavefunction& w) {
  double m = 0.0;
  for (const auto& v : w.values()) m = std::max(m, std::abs(v.imag()));
  return m;
}

double max_abs(const Wavefunction& w) {
  double m = 0.0;
  for (const auto& v : w.values()) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::uint8_t> phase_mask(const Wavefunction& w, double rel) {
  const double cut = rel * max_abs(w);
  std::vector<std::uint8_t> mask(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) mask[i] = std::abs(w[i]) > cut ? 1 : 0;
  return mask;
}

// ---------------------------------------------------------------------------
// binary dump

namespace {

static_assert(std::endian::native == std::endian::little, "dump writer assumes a little-endian host");

constexpr char magic[4] = {'K', 'V', 'H', 'W'};

template <class T>
void put(std::string& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof v);
}

template <class T>
T get(const std::string& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof v);
  return v;
}

}  // namespace

void write_dump(std::ostream& os, const Wavefunction& w) {
  const auto& grid = w.grid();
  std::string head(64 + 32 * grid.rank(), '\0');
  std::memcpy(head.data(), magic, 4);
  put<std::uint32_t>(head, 4, dump_version);
  put<std::uint32_t>(head, 8, static_cast<std::uint32_t>(grid.rank()));
  put<std::uint64_t>(head, 16, grid.size());
  put<std::uint64_t>(head, 24, grid.size() * 2 * sizeof(double));
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const auto& ax = grid.axis(a);
    const std::size_t off = 64 + 32 * a;
    if (ax.name.size() > 8) throw GridError("dump: axis name '" + ax.name + "' longer than 8 bytes");
    std::memcpy(head.data() + off, ax.name.data(), ax.name.size());
    put<std::uint32_t>(head, off + 8, static_cast<std::uint32_t>(ax.points));
    put<std::uint8_t>(head, off + 12, static_cast<std::uint8_t>(ax.role));
    put<double>(head, off + 16, ax.min);
    put<double>(head, off + 24, ax.extent);
  }
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  os.write(reinterpret_cast<const char*>(w.values().data()),
           static_cast<std::streamsize>(w.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("dump: write failed");
}

Wavefunction read_dump(std::istream& is) {
  std::string head(64, '\0');
  if (!is.read(head.data(), 64)) throw std::runtime_error("dump: truncated header");
  if (std::memcmp(head.data(), magic, 4) != 0) throw std::runtime_error("dump: bad magic");
  if (get<std::uint32_t>(head, 4) != dump_version) throw std::runtime_error("dump: unsupported version");
  const auto rank = get<std::uint32_t>(head, 8);
  const auto cells = get<std::uint64_t>(head, 16);
  if (rank == 0 || rank > 16) throw std::runtime_error("dump: bad rank");
  std::string axes(32 * rank, '\0');
  if (!is.read(axes.data(), static_cast<std::streamsize>(axes.size()))) throw std::runtime_error("dump: truncated axes");
  std::vector<Axis> list;
  for (std::size_t a = 0; a < rank; ++a) {
    const std::size_t off = 32 * a;
    Axis ax;
    ax.name.assign(axes.data() + off, strnlen(axes.data() + off, 8));
    ax.points = get<std::uint32_t>(axes, off + 8);
    const auto role = get<std::uint8_t>(axes, off + 12);
    if (role > 2) throw std::runtime_error("dump: bad axis role");
    ax.role = static_cast<Role>(role);
    ax.min = get<double>(axes, off + 16);
    ax.extent = get<double>(axes, off + 24);
    list.push_back(ax);
  }
  GridSpec grid(std::move(list));
  if (grid.size() != cells) throw std::runtime_error("dump: cell count does not match axes");
  std::vector<cplx> values(cells);
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(cells * sizeof(cplx)))) {
    throw std::runtime_error("dump: truncated payload");
  }
  return Wavefunction(std::move(grid), std::move(values));
}

void write_dump_file(const std::string& path, const Wavefunction& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dump(os, w);
}

Wavefunction read_dump_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_dump(is);
}

}  // namespace kvh
