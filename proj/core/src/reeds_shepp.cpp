// Closed-form Reeds-Shepp word solvers. Word equations follow the classical
// derivation; each base word is tried under the timeflip and reflect
// symmetries (and segment-order reversal where the word is asymmetric) so the
// full 48-word family is covered.
#include "stp/reeds_shepp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stp {
namespace {

constexpr double kEps = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double mod2pi(double x) {
  double v = std::fmod(x, 2.0 * M_PI);
  if (v < -M_PI)
    v += 2.0 * M_PI;
  else if (v > M_PI)
    v -= 2.0 * M_PI;
  return v;
}

void polar(double x, double y, double& r, double& theta) {
  r = std::hypot(x, y);
  theta = std::atan2(y, x);
}

// Word C+S+C+ with equal turn directions.
bool LpSpLp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kEps) {
    v = mod2pi(phi - t);
    if (v >= -kEps) return true;
  }
  return false;
}

// Word C+S+C+ with opposite turn directions.
bool LpSpRp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 < 4.0) return false;
  u = std::sqrt(u1 - 4.0);
  const double theta = std::atan2(2.0, u);
  t = mod2pi(t1 + theta);
  v = mod2pi(t - phi);
  return t >= -kEps && v >= -kEps;
}

// Word C|C|C resp. C|CC via the middle arc taken backwards.
bool LpRmL(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 > 4.0) return false;
  u = -2.0 * std::asin(0.25 * u1);
  t = mod2pi(theta + 0.5 * u + M_PI);
  v = mod2pi(phi - t + u);
  return t >= -kEps && u <= kEps;
}

void tau_omega(double u, double v, double xi, double eta, double phi, double& tau,
               double& omega) {
  const double delta = mod2pi(u - v);
  const double A = std::sin(u) - std::sin(delta);
  const double B = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * A - xi * B, xi * A + eta * B);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + M_PI) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Word CC|CC with equal middle arcs.
bool LpRupLumRm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::hypot(xi, eta));
  if (rho > 1.0) return false;
  u = std::acos(rho);
  tau_omega(u, -u, xi, eta, phi, t, v);
  return t >= -kEps && v <= kEps;
}

// Word C|CC|C with equal middle arcs.
bool LpRumLumRp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho < 0.0 || rho > 1.0) return false;
  u = -std::acos(rho);
  if (u < -0.5 * M_PI) return false;
  tau_omega(u, u, xi, eta, phi, t, v);
  return t >= -kEps && v >= -kEps;
}

// Word C|C(pi/2)SC, same turn direction on the outer arcs' side.
bool LpRmSmLm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho < 2.0) return false;
  const double r = std::sqrt(rho * rho - 4.0);
  u = 2.0 - r;
  t = mod2pi(theta + std::atan2(r, -2.0));
  v = mod2pi(phi - 0.5 * M_PI - t);
  return t >= -kEps && u <= kEps && v <= kEps;
}

// Word C|C(pi/2)SC with opposite final turn.
bool LpRmSmRm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho < 2.0) return false;
  t = theta;
  u = 2.0 - rho;
  v = mod2pi(t + 0.5 * M_PI - phi);
  return t >= -kEps && u <= kEps && v <= kEps;
}

// Word C|C(pi/2)SC(pi/2)|C.
bool LpRmSLmRp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = std::hypot(xi, eta);
  if (rho < 2.0) return false;
  u = 4.0 - std::sqrt(rho * rho - 4.0);
  if (u > kEps) return false;
  t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi - (4.0 - u) * eta));
  v = mod2pi(t - phi);
  return t >= -kEps && v >= -kEps;
}

using Turn = RSTurn;
constexpr Turn L = Turn::Left;
constexpr Turn S = Turn::Straight;
constexpr Turn R = Turn::Right;
constexpr Turn N = static_cast<Turn>(3);  // padding

// Segment type rows shared by the candidate constructors.
constexpr Turn kTypes[18][5] = {
    {L, R, L, N, N},  // 0
    {R, L, R, N, N},  // 1
    {L, R, L, R, N},  // 2
    {R, L, R, L, N},  // 3
    {L, R, S, L, N},  // 4
    {R, L, S, R, N},  // 5
    {L, S, R, L, N},  // 6
    {R, S, L, R, N},  // 7
    {L, R, S, R, N},  // 8
    {R, L, S, L, N},  // 9
    {R, S, R, L, N},  // 10
    {L, S, L, R, N},  // 11
    {L, S, R, N, N},  // 12
    {R, S, L, N, N},  // 13
    {L, S, L, N, N},  // 14
    {R, S, R, N, N},  // 15
    {L, R, S, L, R},  // 16
    {R, L, S, R, L},  // 17
};

struct Candidate {
  int type = -1;
  double len[5] = {0, 0, 0, 0, 0};
  double total = kInf;
};

void consider(Candidate& best, int type, double a, double b, double c, double d = 0.0,
              double e = 0.0) {
  const double total =
      std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d) + std::abs(e);
  if (total >= best.total) return;
  best.type = type;
  best.len[0] = a;
  best.len[1] = b;
  best.len[2] = c;
  best.len[3] = d;
  best.len[4] = e;
  best.total = total;
}

void CSC(double x, double y, double phi, Candidate& best) {
  double t, u, v;
  if (LpSpLp(x, y, phi, t, u, v)) consider(best, 14, t, u, v);
  if (LpSpLp(-x, y, -phi, t, u, v)) consider(best, 14, -t, -u, -v);
  if (LpSpLp(x, -y, -phi, t, u, v)) consider(best, 15, t, u, v);
  if (LpSpLp(-x, -y, phi, t, u, v)) consider(best, 15, -t, -u, -v);
  if (LpSpRp(x, y, phi, t, u, v)) consider(best, 12, t, u, v);
  if (LpSpRp(-x, y, -phi, t, u, v)) consider(best, 12, -t, -u, -v);
  if (LpSpRp(x, -y, -phi, t, u, v)) consider(best, 13, t, u, v);
  if (LpSpRp(-x, -y, phi, t, u, v)) consider(best, 13, -t, -u, -v);
}

void CCC(double x, double y, double phi, Candidate& best) {
  double t, u, v;
  if (LpRmL(x, y, phi, t, u, v)) consider(best, 0, t, u, v);
  if (LpRmL(-x, y, -phi, t, u, v)) consider(best, 0, -t, -u, -v);
  if (LpRmL(x, -y, -phi, t, u, v)) consider(best, 1, t, u, v);
  if (LpRmL(-x, -y, phi, t, u, v)) consider(best, 1, -t, -u, -v);
  // Same words traversed end-to-start.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (LpRmL(xb, yb, phi, t, u, v)) consider(best, 0, v, u, t);
  if (LpRmL(-xb, yb, -phi, t, u, v)) consider(best, 0, -v, -u, -t);
  if (LpRmL(xb, -yb, -phi, t, u, v)) consider(best, 1, v, u, t);
  if (LpRmL(-xb, -yb, phi, t, u, v)) consider(best, 1, -v, -u, -t);
}

void CCCC(double x, double y, double phi, Candidate& best) {
  double t, u, v;
  if (LpRupLumRm(x, y, phi, t, u, v)) consider(best, 2, t, u, -u, v);
  if (LpRupLumRm(-x, y, -phi, t, u, v)) consider(best, 2, -t, -u, u, -v);
  if (LpRupLumRm(x, -y, -phi, t, u, v)) consider(best, 3, t, u, -u, v);
  if (LpRupLumRm(-x, -y, phi, t, u, v)) consider(best, 3, -t, -u, u, -v);
  if (LpRumLumRp(x, y, phi, t, u, v)) consider(best, 2, t, u, u, v);
  if (LpRumLumRp(-x, y, -phi, t, u, v)) consider(best, 2, -t, -u, -u, -v);
  if (LpRumLumRp(x, -y, -phi, t, u, v)) consider(best, 3, t, u, u, v);
  if (LpRumLumRp(-x, -y, phi, t, u, v)) consider(best, 3, -t, -u, -u, -v);
}

void CCSC(double x, double y, double phi, Candidate& best) {
  constexpr double h = 0.5 * M_PI;
  double t, u, v;
  if (LpRmSmLm(x, y, phi, t, u, v)) consider(best, 4, t, -h, u, v);
  if (LpRmSmLm(-x, y, -phi, t, u, v)) consider(best, 4, -t, h, -u, -v);
  if (LpRmSmLm(x, -y, -phi, t, u, v)) consider(best, 5, t, -h, u, v);
  if (LpRmSmLm(-x, -y, phi, t, u, v)) consider(best, 5, -t, h, -u, -v);
  if (LpRmSmRm(x, y, phi, t, u, v)) consider(best, 8, t, -h, u, v);
  if (LpRmSmRm(-x, y, -phi, t, u, v)) consider(best, 8, -t, h, -u, -v);
  if (LpRmSmRm(x, -y, -phi, t, u, v)) consider(best, 9, t, -h, u, v);
  if (LpRmSmRm(-x, -y, phi, t, u, v)) consider(best, 9, -t, h, -u, -v);
  // Reversed segment order.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (LpRmSmLm(xb, yb, phi, t, u, v)) consider(best, 6, v, u, -h, t);
  if (LpRmSmLm(-xb, yb, -phi, t, u, v)) consider(best, 6, -v, -u, h, -t);
  if (LpRmSmLm(xb, -yb, -phi, t, u, v)) consider(best, 7, v, u, -h, t);
  if (LpRmSmLm(-xb, -yb, phi, t, u, v)) consider(best, 7, -v, -u, h, -t);
  if (LpRmSmRm(xb, yb, phi, t, u, v)) consider(best, 10, v, u, -h, t);
  if (LpRmSmRm(-xb, yb, -phi, t, u, v)) consider(best, 10, -v, -u, h, -t);
  if (LpRmSmRm(xb, -yb, -phi, t, u, v)) consider(best, 11, v, u, -h, t);
  if (LpRmSmRm(-xb, -yb, phi, t, u, v)) consider(best, 11, -v, -u, h, -t);
}

void CCSCC(double x, double y, double phi, Candidate& best) {
  constexpr double h = 0.5 * M_PI;
  double t, u, v;
  if (LpRmSLmRp(x, y, phi, t, u, v)) consider(best, 16, t, -h, u, -h, v);
  if (LpRmSLmRp(-x, y, -phi, t, u, v)) consider(best, 16, -t, h, -u, h, -v);
  if (LpRmSLmRp(x, -y, -phi, t, u, v)) consider(best, 17, t, -h, u, -h, v);
  if (LpRmSLmRp(-x, -y, phi, t, u, v)) consider(best, 17, -t, h, -u, h, -v);
}

}  // namespace

ReedsSheppPath reeds_shepp_path(const Pose2& from, const Pose2& to, double turn_radius) {
  if (!(turn_radius > 0.0)) throw std::invalid_argument("turn_radius must be > 0");

  const double c = std::cos(from.heading);
  const double s = std::sin(from.heading);
  const double dx = to.pos.x - from.pos.x;
  const double dy = to.pos.y - from.pos.y;
  const double x = (c * dx + s * dy) / turn_radius;
  const double y = (-s * dx + c * dy) / turn_radius;
  const double phi = wrap_angle(to.heading - from.heading);

  Candidate best;
  CSC(x, y, phi, best);
  CCC(x, y, phi, best);
  CCCC(x, y, phi, best);
  CCSC(x, y, phi, best);
  CCSCC(x, y, phi, best);

  ReedsSheppPath path;
  path.normalized_length = best.total;
  if (best.type < 0) return path;  // unreachable in practice
  for (int i = 0; i < 5; ++i) {
    const Turn turn = kTypes[best.type][i];
    if (turn == N) break;
    path.segments.push_back({turn, best.len[i]});
  }
  return path;
}

double reeds_shepp_length(const Pose2& from, const Pose2& to, double turn_radius) {
  return reeds_shepp_path(from, to, turn_radius).normalized_length * turn_radius;
}

}  // namespace stp
