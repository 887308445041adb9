#include "prs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace prs {

std::string to_string(Boundary b) {
  return b == Boundary::torus ? "torus" : "square";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "square" || s == "clipped_square") return Boundary::clipped_square;
  if (s == "torus") return Boundary::torus;
  throw InvalidParameter("unknown boundary mode: " + s);
}

double ModelParams::intensity() const {
  return lambda / (std::numbers::pi * r * r);
}

void ModelParams::validate() const {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw InvalidParameter("lambda must be a positive finite number");
  }
  if (!std::isfinite(r) || r <= 0.0) {
    throw InvalidParameter("r must be a positive finite number");
  }
  if (max_rounds == 0) throw InvalidParameter("max_rounds must be at least 1");
}

std::string ModelParams::to_key_value() const {
  std::ostringstream out;
  out << "lambda=" << format_double(lambda) << '\n'
      << "r=" << format_double(r) << '\n'
      << "max_rounds=" << max_rounds << '\n'
      << "boundary=" << to_string(boundary) << '\n';
  return out.str();
}

ModelParams ModelParams::from_key_value(const std::string& text) {
  ModelParams p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidParameter("malformed line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "lambda") {
        p.lambda = std::stod(value);
      } else if (key == "r") {
        p.r = std::stod(value);
      } else if (key == "max_rounds") {
        p.max_rounds = std::stoull(value);
      } else if (key == "boundary") {
        p.boundary = boundary_from_string(value);
      } else {
        throw InvalidParameter("unknown key: " + key);
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InvalidParameter*>(&e)) throw;
      throw InvalidParameter("bad value for " + key + ": " + value);
    }
  }
  p.validate();
  return p;
}

std::string to_csv(const PointSet& ps) {
  std::string out = "x,y\n";
  for (const Point& p : ps.points) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += '\n';
  }
  return out;
}

double boundary_squared_distance(Point a, Point b, Boundary boundary) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  if (boundary == Boundary::torus) {
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
  }
  return dx * dx + dy * dy;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::span<const Point> points, double min_side, Boundary boundary)
    : boundary_(boundary) {
  if (!(min_side > 0.0)) throw InvalidParameter("cell side must be positive");
  n_ = min_side >= 1.0 ? 1 : std::max(1, static_cast<int>(std::floor(1.0 / min_side)));
  side_ = 1.0 / n_;

  offsets_.assign(cell_count() + 1, 0);
  std::vector<std::size_t> cell(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell[i] = cell_of(points[i]);
    ++offsets_[cell[i] + 1];
  }
  for (std::size_t c = 0; c < cell_count(); ++c) offsets_[c + 1] += offsets_[c];
  items_.resize(points.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    items_[fill[cell[i]]++] = static_cast<std::uint32_t>(i);
  }
}

int Grid::cell_coord(double v) const {
  const int c = static_cast<int>(std::floor(v * n_));
  return std::clamp(c, 0, n_ - 1);
}

std::span<const std::uint32_t> Grid::bucket(std::size_t cell) const {
  return {items_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
}

std::vector<std::size_t> Grid::neighborhood(int cx, int cy) const {
  std::vector<std::size_t> cells;
  cells.reserve(9);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      int x = cx + dx;
      int y = cy + dy;
      if (boundary_ == Boundary::torus) {
        x = (x + n_) % n_;
        y = (y + n_) % n_;
      } else if (x < 0 || y < 0 || x >= n_ || y >= n_) {
        continue;
      }
      cells.push_back(cell_index(x, y));
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

void Grid::for_each_close_pair(
    std::span<const Point> points, double max_dist2,
    const std::function<void(std::uint32_t, std::uint32_t)>& f) const {
  for (int cy = 0; cy < n_; ++cy) {
    for (int cx = 0; cx < n_; ++cx) {
      const auto home = bucket(cell_index(cx, cy));
      if (home.empty()) continue;
      const auto cells = neighborhood(cx, cy);
      for (std::uint32_t i : home) {
        for (std::size_t nb : cells) {
          for (std::uint32_t j : bucket(nb)) {
            if (j <= i) continue;
            if (boundary_squared_distance(points[i], points[j], boundary_) < max_dist2) {
              f(i, j);
            }
          }
        }
      }
    }
  }
}

Grid build_grid(const PointSet& points, double cell_side, Boundary boundary) {
  return Grid(points.points, cell_side, boundary);
}

// ---------------------------------------------------------------------------
// Bad pairs

namespace {

BadPairReport finish_report(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  BadPairReport report;
  std::sort(pairs.begin(), pairs.end());
  report.bad_points.reserve(2 * pairs.size());
  for (const auto& [i, j] : pairs) {
    report.bad_points.push_back(i);
    report.bad_points.push_back(j);
  }
  std::sort(report.bad_points.begin(), report.bad_points.end());
  report.bad_points.erase(std::unique(report.bad_points.begin(), report.bad_points.end()),
                          report.bad_points.end());
  report.k = pairs.size();
  report.pairs = std::move(pairs);
  return report;
}

}  // namespace

BadPairReport find_bad_pairs(const PointSet& points, const ModelParams& params) {
  const double diameter = 2.0 * params.r;
  const Grid grid(points.points, diameter, params.boundary);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  grid.for_each_close_pair(points.points, diameter * diameter,
                           [&](std::uint32_t i, std::uint32_t j) { pairs.emplace_back(i, j); });
  return finish_report(std::move(pairs));
}

BadPairReport find_bad_pairs_brute_force(const PointSet& points,
                                         const ModelParams& params) {
  const double d2 = 4.0 * params.r * params.r;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  const auto n = static_cast<std::uint32_t>(points.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (boundary_squared_distance(points.points[i], points.points[j], params.boundary) < d2) {
        pairs.emplace_back(i, j);
      }
    }
  }
  return finish_report(std::move(pairs));
}

// ---------------------------------------------------------------------------
// Resampling set

namespace {

// Distance from v to the interval [lo, hi], periodic with period 1 if asked.
double interval_gap(double v, double lo, double hi, bool periodic) {
  auto gap = [&](double w) { return w < lo ? lo - w : (w > hi ? w - hi : 0.0); };
  if (!periodic) return gap(v);
  return std::min({gap(v), gap(v - 1.0), gap(v + 1.0)});
}

}  // namespace

ResamplingSet::ResamplingSet(std::vector<Point> centers, const ModelParams& params)
    : centers_(std::move(centers)),
      radius_(2.0 * params.r),
      boundary_(params.boundary),
      grid_(centers_, 2.0 * params.r, params.boundary) {
  if (centers_.empty()) {
    throw InvalidState("resampling set needs at least one bad point");
  }
  const bool periodic = boundary_ == Boundary::torus;
  const double side = grid_.cell_side();
  const double r2 = radius_ * radius_;
  for (const Point& c : centers_) {
    const int cx = grid_.cell_coord(c.x);
    const int cy = grid_.cell_coord(c.y);
    for (std::size_t cell : grid_.neighborhood(cx, cy)) {
      const Point o = cell_origin(cell);
      const double gx = interval_gap(c.x, o.x, o.x + side, periodic);
      const double gy = interval_gap(c.y, o.y, o.y + side, periodic);
      if (gx * gx + gy * gy <= r2) covering_cells_.push_back(cell);
    }
  }
  std::sort(covering_cells_.begin(), covering_cells_.end());
  covering_cells_.erase(std::unique(covering_cells_.begin(), covering_cells_.end()),
                        covering_cells_.end());
}

double ResamplingSet::covering_area() const {
  const double side = grid_.cell_side();
  return static_cast<double>(covering_cells_.size()) * side * side;
}

Point ResamplingSet::cell_origin(std::size_t cell) const {
  const auto n = static_cast<std::size_t>(grid_.cells_per_side());
  const double side = grid_.cell_side();
  return {static_cast<double>(cell % n) * side, static_cast<double>(cell / n) * side};
}

bool ResamplingSet::contains(Point p) const {
  const double r2 = radius_ * radius_;
  for (std::size_t cell : grid_.neighborhood(grid_.cell_coord(p.x), grid_.cell_coord(p.y))) {
    for (std::uint32_t i : grid_.bucket(cell)) {
      if (boundary_squared_distance(p, centers_[i], boundary_) <= r2) return true;
    }
  }
  return false;
}

ResamplingSet build_resampling_set(const BadPairReport& report, const PointSet& points,
                                   const ModelParams& params) {
  if (report.k == 0 || report.bad_points.empty()) {
    throw InvalidState("no bad pairs: configuration must not be resampled");
  }
  std::vector<Point> centers;
  centers.reserve(report.bad_points.size());
  for (std::uint32_t i : report.bad_points) centers.push_back(points.points.at(i));
  return ResamplingSet(std::move(centers), params);
}

namespace {

Point uniform_in_covering(const ResamplingSet& set, Rng& rng) {
  const auto& cells = set.covering_cells();
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Point o = set.cell_origin(cells[pick(rng)]);
  const double x = o.x + set.cell_side() * unit(rng);
  const double y = o.y + set.cell_side() * unit(rng);
  return {std::min(x, 1.0), std::min(y, 1.0)};
}

}  // namespace

AreaEstimate resampling_set_area_mc(const ResamplingSet& set, std::uint64_t samples,
                                    Rng& rng) {
  if (samples == 0) throw InvalidParameter("samples must be at least 1");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    if (set.contains(uniform_in_covering(set, rng))) ++hits;
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  const double box = set.covering_area();
  return {box * p, box * std::sqrt(p * (1.0 - p) / n), samples};
}

// ---------------------------------------------------------------------------
// Sampling

PointSet sample_poisson_square(const ModelParams& params, Rng& rng) {
  std::poisson_distribution<std::uint64_t> count(params.intensity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint64_t n = count(rng);
  PointSet ps;
  ps.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = unit(rng);
    const double y = unit(rng);
    ps.points.push_back({x, y});
  }
  return ps;
}

PointSet resample_step(const PointSet& points, const ResamplingSet& set,
                       const ModelParams& params, Rng& rng, const ResamplingSet* excluded) {
  PointSet next;
  next.points.reserve(points.size());
  for (const Point& p : points.points) {
    if (!set.contains(p)) next.points.push_back(p);
  }
  std::poisson_distribution<std::uint64_t> count(params.intensity() * set.covering_area());
  const std::uint64_t candidates = count(rng);
  for (std::uint64_t i = 0; i < candidates; ++i) {
    const Point p = uniform_in_covering(set, rng);
    if (set.contains(p) && !(excluded && excluded->contains(p))) next.points.push_back(p);
  }
  return next;
}

PointSet resample_step(const PointSet& points, const ResamplingSet& set,
                       const ModelParams& params, Rng& rng) {
  return resample_step(points, set, params, rng, nullptr);
}

namespace {

PrsResult run_prs(const ModelParams& params, Rng& rng, const RoundObserver& observer,
                  const ResamplingSet* excluded) {
  params.validate();
  PrsResult result;
  RunStats& stats = result.stats;
  PointSet current = sample_poisson_square(params, rng);
  if (excluded) {
    std::erase_if(current.points, [&](Point p) { return excluded->contains(p); });
  }
  for (;;) {
    const BadPairReport report = find_bad_pairs(current, params);
    stats.k_history.push_back(report.k);
    stats.n_history.push_back(current.size());
    if (report.k == 0) {
      stats.converged = true;
      break;
    }
    if (stats.rounds >= params.max_rounds) break;
    const ResamplingSet set = build_resampling_set(report, current, params);
    if (observer) observer(stats.rounds, current, report, set);
    stats.resample_area_history.push_back(set.covering_area());
    current = resample_step(current, set, params, rng, excluded);
    ++stats.rounds;
  }
  result.points = std::move(current);
  return result;
}

}  // namespace

PrsResult prs_sample(const ModelParams& params, Rng& rng, const RoundObserver& observer) {
  return run_prs(params, rng, observer, nullptr);
}

PrsResult prs_sample_outside(const ModelParams& params, const ResamplingSet& excluded, Rng& rng) {
  return run_prs(params, rng, {}, &excluded);
}

PrsResult prs_sample_seeded(const ModelParams& params, std::uint64_t seed,
                            const RoundObserver& observer) {
  Rng rng(seed);
  PrsResult result = prs_sample(params, rng, observer);
  result.stats.seed = seed;
  return result;
}

RejectionResult rejection_sample_counted(const ModelParams& params, Rng& rng,
                                         std::uint64_t max_attempts) {
  params.validate();
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    PointSet candidate = sample_poisson_square(params, rng);
    if (find_bad_pairs(candidate, params).k == 0) return {std::move(candidate), attempt};
  }
  throw Infeasible("rejection sampler exceeded " + std::to_string(max_attempts) +
                   " attempts");
}

PointSet rejection_sample(const ModelParams& params, Rng& rng) {
  return rejection_sample_counted(params, rng).points;
}

}  // namespace prs
