#include "tpekit/toolpath/path.hpp"

#include <cmath>

#include "tpekit/error.hpp"

namespace tpekit::toolpath {

namespace {

bool finite(const Vec3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

bool close(const Vec3& a, const Vec3& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

}  // namespace

double Move::length() const noexcept {
  return std::sqrt((end.x - start.x) * (end.x - start.x) + (end.y - start.y) * (end.y - start.y) +
                   (end.z - start.z) * (end.z - start.z));
}

Toolpath::Toolpath(std::vector<Move> moves) {
  moves_.reserve(moves.size());
  for (const auto& m : moves) push_back(m);
}

void Toolpath::push_back(const Move& m) {
  if (!finite(m.start) || !finite(m.end)) throw ArgumentError("move coordinates must be finite");
  if (!(m.feedrate_mm_s > 0.0)) throw ArgumentError("move feedrate must be > 0");
  if (m.tool < 0) throw ArgumentError("tool index must be >= 0");
  if (m.kind == MoveKind::Extrude &&
      (!(m.width_mm > 0.0) || !(m.layer_height_mm > 0.0) || !(m.multiplier > 0.0)))
    throw ArgumentError("extrude moves need width, layer height and multiplier > 0");
  if (!moves_.empty() && !close(moves_.back().end, m.start, kChainTolerance))
    throw ArgumentError("move " + std::to_string(moves_.size()) +
                        " does not start where the previous move ended");
  moves_.push_back(m);
}

void Toolpath::travel_to(const Vec3& to, double feedrate_mm_s, int tool) {
  Move m;
  m.kind = MoveKind::Travel;
  m.start = moves_.empty() ? to : moves_.back().end;
  m.end = to;
  m.feedrate_mm_s = feedrate_mm_s;
  m.tool = tool;
  push_back(m);
}

void Toolpath::append(const Toolpath& other) {
  for (const auto& m : other.moves_) push_back(m);
}

std::vector<double> Toolpath::layer_heights() const {
  std::vector<double> zs;
  for (const auto& m : moves_) {
    for (double z : {m.start.z, m.end.z}) {
      bool seen = false;
      for (double s : zs) seen = seen || std::abs(s - z) <= kChainTolerance;
      if (!seen) zs.push_back(z);
    }
  }
  return zs;
}

bool is_chained(const std::vector<Move>& moves, double tol) {
  for (std::size_t k = 1; k < moves.size(); ++k)
    if (!close(moves[k - 1].end, moves[k].start, tol)) return false;
  return true;
}

}  // namespace tpekit::toolpath
