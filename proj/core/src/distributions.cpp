#include "aeroplan/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "aeroplan/error.hpp"

namespace aeroplan {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEps = 1e-16;
constexpr int kCfMaxIter = 10000;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_cf(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kCfEps) return h;
  }
  return h;
}

// Kronrod nodes and weights for the 7/15 pair on [-1, 1].
constexpr std::array<double, 8> kXk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& kronrod, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWk[7];
  double rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXk[j];
    const double fsum = f(c - dx) + f(c + dx);
    rk += kWk[j] * fsum;
    if (j % 2 == 1) rg += kWg[j / 2] * fsum;
  }
  kronrod = rk * h;
  error = std::abs((rk - rg) * h);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
  double k = 0.0;
  double err = 0.0;
  gk15(f, a, b, k, err);
  if (err <= tol || depth <= 0 || !(std::abs(b - a) > 1e-12)) return k;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1);
}

void require_df(double df, const char* what) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be > 0");
  }
}

// Density of s = sqrt(chi2_df / df).
double scaled_chi_log_density(double s, double df) {
  return 0.5 * df * std::log(df) - std::lgamma(0.5 * df) -
         (0.5 * df - 1.0) * std::numbers::ln2 + (df - 1.0) * std::log(s) -
         0.5 * df * s * s;
}

// P(range of k iid standard normals > w).
double range_sf(double w, int k) {
  if (w <= 0.0) return 1.0;
  const double kk = k;
  auto g = [w, k, kk](double z) {
    const double phi_z = normal_cdf(z);
    const double inside = phi_z - normal_cdf(z - w);
    return kk * normal_pdf(z) *
           (std::pow(phi_z, k - 1) - std::pow(std::max(inside, 0.0), k - 1));
  };
  const double v = integrate(g, -8.5, 8.5 + w, 1e-12);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, abs_tol, max_depth);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta parameters must be > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "incomplete beta needs x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double f_cdf(double x, double df1, double df2) {
  require_df(df1, "df1");
  require_df(df2, "df2");
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidArgument, "F value is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return incomplete_beta(df1 * x / (df1 * x + df2), 0.5 * df1, 0.5 * df2);
}

double f_sf(double x, double df1, double df2) {
  require_df(df1, "df1");
  require_df(df2, "df2");
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidArgument, "F value is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return incomplete_beta(df2 / (df2 + df1 * x), 0.5 * df2, 0.5 * df1);
}

double t_cdf(double t, double df) {
  require_df(df, "df");
  if (std::isnan(t)) throw Error(ErrorCode::kInvalidArgument, "t value is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double df) {
  require_df(df, "df");
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile needs p in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, df);
  double lo = 0.0;
  double hi = 1.0;
  while (t_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ptukey_sf(double q, int k, double df) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "studentized range needs k >= 2");
  require_df(df, "df");
  if (std::isnan(q)) throw Error(ErrorCode::kInvalidArgument, "q is NaN");
  if (q <= 0.0) return 1.0;
  if (std::isinf(q)) return 0.0;
  const double spread = 15.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 10.0 ? 10.0 : 0.0);
  auto outer = [q, k, df](double s) {
    if (s <= 0.0) return 0.0;
    const double log_f = scaled_chi_log_density(s, df);
    if (log_f < -745.0) return 0.0;
    return std::exp(log_f) * range_sf(q * s, k);
  };
  // Split at the mode so the adaptive rule sees the peak.
  const double mode = df > 1.0 ? std::sqrt((df - 1.0) / df) : lo;
  double v = 0.0;
  if (mode > lo) v += integrate(outer, lo, mode, 5e-9);
  v += integrate(outer, std::max(lo, mode), hi, 5e-9);
  return std::clamp(v, 0.0, 1.0);
}

double ptukey(double q, int k, double df) { return 1.0 - ptukey_sf(q, k, df); }

}  // namespace aeroplan
