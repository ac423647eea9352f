#include "ecdiv/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace ecdiv {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kKronrod[7] * fc, g = kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double s = f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
    k += kKronrod[i] * s;
    if (i % 2 == 1) g += kGauss[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

IntegralEstimate integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    int max_intervals) {
  std::priority_queue<Piece> heap;
  heap.push(kronrod(f, a, b));
  double value = heap.top().value, error = heap.top().error;
  while (error > abs_tol && int(heap.size()) < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece l = kronrod(f, worst.a, mid), r = kronrod(f, mid, worst.b);
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  IntegralEstimate out;
  out.intervals = int(heap.size());
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  return out;
}

}  // namespace ecdiv
